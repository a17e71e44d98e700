#include "cinglear/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "cinglear/csv.hpp"
#include "cinglear/errors.hpp"
#include "cinglear/features.hpp"
#include "cinglear/random.hpp"

namespace cinglear {

using namespace std::chrono;

int iso_weekday(year_month_day date) {
    return static_cast<int>(weekday{sys_days{date}}.iso_encoding());
}

year_month_day PanelDataset::date(int day) const {
    return year_month_day{sys_days{start_date} + days{day}};
}

std::string PanelDataset::date_string(int day) const {
    const auto ymd = date(day);
    std::ostringstream os;
    os << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
       << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2)
       << static_cast<unsigned>(ymd.day());
    return os.str();
}

std::vector<std::string> PanelDataset::exogenous_names() const {
    std::vector<std::string> names;
    names.reserve(exogenous.size());
    for (const auto& s : exogenous) names.push_back(s.name);
    return names;
}

int PanelDataset::find_exogenous(std::string_view name) const {
    for (std::size_t k = 0; k < exogenous.size(); ++k)
        if (exogenous[k].name == name) return static_cast<int>(k);
    return -1;
}

PanelDataset PanelDataset::head(int n) const {
    n = std::clamp(n, 0, n_days());
    PanelDataset out;
    out.start_date = start_date;
    out.hours_per_day = hours_per_day;
    out.prices = prices.topRows(n);
    for (const auto& s : exogenous) out.exogenous.push_back({s.name, s.values.topRows(n)});
    out.day_of_week.assign(day_of_week.begin(), day_of_week.begin() + n);
    return out;
}

void PanelDataset::validate() const {
    const auto fail = [](const std::string& msg) { throw Error(Errc::InvalidSpec, msg); };
    if (hours_per_day < 1) fail("hours_per_day must be positive");
    if (prices.cols() != hours_per_day) fail("price matrix width != hours_per_day");
    if (!prices.allFinite()) fail("non-finite price");
    std::unordered_set<std::string> names;
    for (const auto& s : exogenous) {
        if (!names.insert(s.name).second) fail("duplicate exogenous name " + s.name);
        if (s.values.rows() != prices.rows() || s.values.cols() != prices.cols())
            fail("exogenous series " + s.name + " has wrong shape");
        if (!s.values.allFinite()) fail("non-finite value in " + s.name);
    }
    if (static_cast<int>(day_of_week.size()) != n_days()) fail("day_of_week length mismatch");
    for (int d = 0; d < n_days(); ++d) {
        if (day_of_week[d] < 1 || day_of_week[d] > 7) fail("weekday out of range");
        if (d > 0 && day_of_week[d] != day_of_week[d - 1] % 7 + 1)
            fail("weekdays are not consecutive");
    }
}

namespace {

struct Stamp {
    sys_days date;
    int hour = 0;
};

int parse_int(std::string_view s, const std::string& whole) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw Error(Errc::ParseError, "bad timestamp '" + whole + "'");
    return v;
}

// Accepts YYYY-MM-DD[T| ]HH[:MM[:SS]]; minutes and seconds must be zero.
Stamp parse_timestamp(const std::string& text) {
    const std::string_view s = text;
    if (s.size() < 13 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' '))
        throw Error(Errc::ParseError, "bad timestamp '" + text + "'");
    const year_month_day ymd{year{parse_int(s.substr(0, 4), text)},
                             month{static_cast<unsigned>(parse_int(s.substr(5, 2), text))},
                             day{static_cast<unsigned>(parse_int(s.substr(8, 2), text))}};
    if (!ymd.ok()) throw Error(Errc::ParseError, "invalid date '" + text + "'");
    const int hour = parse_int(s.substr(11, 2), text);
    auto rest = s.substr(13);
    while (!rest.empty()) {
        if (rest.size() < 3 || rest[0] != ':' || parse_int(rest.substr(1, 2), text) != 0)
            throw Error(Errc::ParseError, "timestamp is not on the hour: '" + text + "'");
        rest.remove_prefix(3);
    }
    if (hour < 0 || hour > 23) throw Error(Errc::ParseError, "hour out of range '" + text + "'");
    return {sys_days{ymd}, hour};
}

int column_of(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(Errc::UnknownColumn, "column '" + name + "' not found");
    return static_cast<int>(it - header.begin());
}

} // namespace

PanelDataset parse_series(std::istream& in, const CsvSchema& schema) {
    const int H = schema.hours_per_day;
    if (H < 1 || H > 24) throw Error(Errc::InvalidSpec, "hours_per_day must be in 1..24");

    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::EmptyInput, "empty CSV");
    const auto header = csv::split_line(line);
    const int ts_col = column_of(header, schema.timestamp_column);
    std::vector<int> value_cols{column_of(header, schema.price_column)};
    std::unordered_set<std::string> seen;
    for (const auto& [name, column] : schema.exogenous) {
        if (!seen.insert(name).second)
            throw Error(Errc::InvalidSpec, "duplicate exogenous name " + name);
        value_cols.push_back(column_of(header, column));
    }
    const auto n_series = value_cols.size();

    // Per calendar day: per hour, the running sum and count of observations.
    struct Cell {
        std::vector<double> sum;
        int count = 0;
    };
    std::map<sys_days, std::vector<Cell>> by_day;
    long long previous_key = -1;
    bool have_previous = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + " has " +
                                              std::to_string(fields.size()) + " fields");
        const auto stamp = parse_timestamp(fields[ts_col]);
        if (stamp.hour >= H)
            throw Error(Errc::ParseError, "hour " + std::to_string(stamp.hour) +
                                              " outside a " + std::to_string(H) + "-hour day");
        const long long key = stamp.date.time_since_epoch().count() * 24LL + stamp.hour;
        if (have_previous && key < previous_key)
            throw Error(Errc::NonMonotonicTimestamps, "line " + std::to_string(line_no));
        if (have_previous && key == previous_key && schema.fill == FillStrategy::None)
            throw Error(Errc::NonMonotonicTimestamps,
                        "duplicated hour at line " + std::to_string(line_no));
        previous_key = key;
        have_previous = true;

        auto& cells = by_day[stamp.date];
        if (cells.empty()) cells.resize(H, Cell{std::vector<double>(n_series, 0.0), 0});
        auto& cell = cells[stamp.hour];
        for (std::size_t s = 0; s < n_series; ++s)
            cell.sum[s] += csv::parse_double(fields[value_cols[s]]);
        ++cell.count;
    }
    if (by_day.empty()) throw Error(Errc::EmptyInput, "CSV has no data rows");

    const sys_days first = by_day.begin()->first;
    const int n_days =
        static_cast<int>((by_day.rbegin()->first - first).count()) + 1;
    if (static_cast<int>(by_day.size()) != n_days)
        throw Error(Errc::MissingHour, "calendar days are missing from the series");

    std::vector<Matrix> values(n_series, Matrix(n_days, H));
    // Flattened (day, hour) positions still needing a value.
    std::vector<bool> missing(static_cast<std::size_t>(n_days) * H, false);
    int d = 0;
    for (const auto& [date, cells] : by_day) {
        for (int h = 0; h < H; ++h) {
            const auto& cell = cells[h];
            if (cell.count == 0) {
                if (schema.fill == FillStrategy::None)
                    throw Error(Errc::MissingHour, "no row for hour " + std::to_string(h) +
                                                       " on day " + std::to_string(d));
                missing[static_cast<std::size_t>(d) * H + h] = true;
                continue;
            }
            for (std::size_t s = 0; s < n_series; ++s)
                values[s](d, h) = cell.sum[s] / cell.count;
        }
        ++d;
    }
    if (schema.fill == FillStrategy::Forward) {
        const auto total = missing.size();
        std::size_t first_present = 0;
        while (first_present < total && missing[first_present]) ++first_present;
        if (first_present == total) throw Error(Errc::MissingHour, "no observed hours");
        for (std::size_t i = 0; i < total; ++i) {
            if (!missing[i]) continue;
            // Leading gaps have no previous hour; borrow the first observation.
            const std::size_t src = i < first_present ? first_present : i - 1;
            for (std::size_t s = 0; s < n_series; ++s)
                values[s](static_cast<Eigen::Index>(i / H), static_cast<Eigen::Index>(i % H)) =
                    values[s](static_cast<Eigen::Index>(src / H), static_cast<Eigen::Index>(src % H));
        }
    }

    PanelDataset out;
    out.start_date = year_month_day{first};
    out.hours_per_day = H;
    out.prices = std::move(values[0]);
    for (std::size_t k = 0; k < schema.exogenous.size(); ++k)
        out.exogenous.push_back({schema.exogenous[k].first, std::move(values[k + 1])});
    out.day_of_week.resize(n_days);
    const int w0 = iso_weekday(out.start_date);
    for (int i = 0; i < n_days; ++i) out.day_of_week[i] = (w0 - 1 + i) % 7 + 1;
    return out;
}

PanelDataset load_series(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    return parse_series(in, schema);
}

void write_series(std::ostream& out, const PanelDataset& data) {
    out << "timestamp,lmp";
    for (const auto& s : data.exogenous) out << ',' << s.name;
    out << '\n';
    for (int d = 0; d < data.n_days(); ++d) {
        const auto date = data.date_string(d);
        for (int h = 0; h < data.hours_per_day; ++h) {
            out << date << 'T' << (h < 10 ? "0" : "") << h << ":00:00,"
                << csv::format_double(data.prices(d, h));
            for (const auto& s : data.exogenous) out << ',' << csv::format_double(s.values(d, h));
            out << '\n';
        }
    }
}

void write_series(const std::filesystem::path& path, const PanelDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    write_series(out, data);
}

namespace {

std::vector<int> choose_rows(Rng& rng, std::vector<int> candidates, int count) {
    for (int i = 0; i < count; ++i) {
        const auto j = i + static_cast<int>(rng.below(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(count);
    std::sort(candidates.begin(), candidates.end());
    return candidates;
}

} // namespace

SyntheticPanel generate_synthetic(const SyntheticSpec& spec) {
    const int H = spec.hours_per_day;
    const int K = static_cast<int>(spec.exogenous_names.size());
    if (spec.n_days < 1 || H < 1 || H > 24 || spec.support < 0 || !(spec.noise_sigma >= 0.0) ||
        !std::isfinite(spec.coef_scale) || !spec.start_date.ok())
        throw Error(Errc::InvalidSpec, "bad synthetic spec");
    const auto layout = make_layout(H, spec.exogenous_names);
    const int M = layout.width();
    std::vector<int> candidates;
    for (int j = 0; j < M; ++j)
        if (layout.features[j].kind == FeatureKind::Exogenous) candidates.push_back(j);
    if (spec.support > static_cast<int>(candidates.size()))
        throw Error(Errc::InvalidSpec, "support exceeds the number of exogenous feature groups");

    Rng rng(spec.seed);
    SyntheticPanel out;
    out.support = choose_rows(rng, candidates, spec.support);
    out.truth.B = Matrix::Zero(M, H);
    out.truth.intercept = Vector::Constant(H, spec.price_level);
    out.truth.feature_names = layout.names();
    for (int j : out.support) {
        const double magnitude = spec.coef_scale * (0.5 + rng.uniform());
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double phase = rng.uniform();
        for (int h = 0; h < H; ++h) {
            const double profile =
                1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(h) / H + phase));
            out.truth.B(j, h) = sign * magnitude * profile;
        }
    }

    // Seven burn-in days give every panel day a complete set of lags.
    constexpr int burn_in = kFirstFeatureDay;
    const int total = spec.n_days + burn_in;
    std::vector<Matrix> exog(K, Matrix(total, H));
    for (int k = 0; k < K; ++k)
        for (int d = 0; d < total; ++d)
            for (int h = 0; h < H; ++h) exog[k](d, h) = rng.normal();

    auto& data = out.data;
    data.start_date = spec.start_date;
    data.hours_per_day = H;
    data.prices.resize(spec.n_days, H);
    for (int d = 0; d < spec.n_days; ++d) {
        for (int h = 0; h < H; ++h) {
            double value = spec.price_level;
            for (int j : out.support) {
                const auto& f = layout.features[j];
                value += out.truth.B(j, h) * exog[f.series](d + burn_in - f.lag, f.index);
            }
            data.prices(d, h) = value;
        }
        for (int h = 0; h < H; ++h) data.prices(d, h) += spec.noise_sigma * rng.normal();
    }
    for (int k = 0; k < K; ++k)
        data.exogenous.push_back({spec.exogenous_names[k], exog[k].bottomRows(spec.n_days)});
    data.day_of_week.resize(spec.n_days);
    const int w0 = iso_weekday(spec.start_date);
    for (int d = 0; d < spec.n_days; ++d) data.day_of_week[d] = (w0 - 1 + d) % 7 + 1;
    data.validate();
    return out;
}

RegressionFixture generate_regression_fixture(const RegressionSpec& spec) {
    if (spec.n_rows < 2 || spec.n_features < 1 || spec.n_outputs < 1 || spec.support < 0 ||
        spec.support > spec.n_features || !(spec.noise_sigma >= 0.0))
        throw Error(Errc::InvalidSpec, "bad regression spec");
    Rng rng(spec.seed);
    const int n = spec.n_rows;
    RegressionFixture out;
    out.X.resize(n, spec.n_features);
    for (int j = 0; j < spec.n_features; ++j)
        for (int i = 0; i < n; ++i) out.X(i, j) = rng.normal();
    for (int j = 0; j < spec.n_features; ++j) {
        auto col = out.X.col(j);
        col.array() -= col.mean();
        col /= std::sqrt(col.squaredNorm() / n);
    }
    std::vector<int> all(spec.n_features);
    for (int j = 0; j < spec.n_features; ++j) all[j] = j;
    out.support = choose_rows(rng, all, spec.support);
    out.truth = Matrix::Zero(spec.n_features, spec.n_outputs);
    for (int j : out.support)
        for (int h = 0; h < spec.n_outputs; ++h)
            out.truth(j, h) =
                (rng.uniform() < 0.5 ? -1.0 : 1.0) * spec.coef_scale * (0.5 + rng.uniform());
    out.P = out.X * out.truth;
    for (int i = 0; i < n; ++i)
        for (int h = 0; h < spec.n_outputs; ++h) out.P(i, h) += spec.noise_sigma * rng.normal();
    out.P.rowwise() -= out.P.colwise().mean();
    return out;
}

} // namespace cinglear
