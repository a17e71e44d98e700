#include "cinglear/features.hpp"

#include <iomanip>
#include <sstream>

#include "cinglear/errors.hpp"

namespace cinglear {

namespace {

std::string hour_suffix(int h) {
    std::ostringstream os;
    os << "_h" << std::setw(2) << std::setfill('0') << h + 1;
    return os.str();
}

void append_block(FeatureLayout& layout, const std::string& block, FeatureKind kind, int series,
                  int lag) {
    for (int h = 0; h < layout.hours_per_day; ++h)
        layout.features.push_back({block + hour_suffix(h), block, kind, series, lag, h});
}

constexpr int kPriceLags[] = {1, 2, 3, 7};
constexpr int kExogenousLags[] = {0, 1, 7};

std::string exogenous_block(const std::string& name, int lag) {
    return lag == 0 ? name + "_d0" : name + "_lag" + std::to_string(lag);
}

void check_day(const PanelDataset& data, int day) {
    if (day < kFirstFeatureDay)
        throw Error(Errc::InsufficientHistory,
                    "day " + std::to_string(day) + " lacks a 7-day lag history");
    if (day >= data.n_days())
        throw Error(Errc::InsufficientData, "day " + std::to_string(day) + " beyond the panel");
}

Vector feature_row(const PanelDataset& data, const FeatureLayout& layout, int day,
                   const SeriesTransform& price_tf, std::span<const SeriesTransform> exog_tf) {
    check_day(data, day);
    Vector x(layout.width());
    for (int j = 0; j < layout.width(); ++j) {
        const auto& f = layout.features[j];
        switch (f.kind) {
        case FeatureKind::PriceLag: x(j) = price_tf.forward(data.prices(day - f.lag, f.index)); break;
        case FeatureKind::Exogenous:
            x(j) = exog_tf[f.series].forward(data.exogenous[f.series].values(day - f.lag, f.index));
            break;
        case FeatureKind::DayOfWeek: x(j) = data.day_of_week[day] == f.index + 1 ? 1.0 : 0.0; break;
        }
    }
    return x;
}

} // namespace

std::vector<std::string> FeatureLayout::names() const {
    std::vector<std::string> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

std::vector<int> FeatureLayout::block_indices(std::string_view block) const {
    std::vector<int> out;
    for (int j = 0; j < width(); ++j)
        if (features[j].block == block) out.push_back(j);
    return out;
}

std::string FeatureLayout::manifest() const {
    std::string out;
    for (const auto& f : features) {
        out += f.name;
        out += '\n';
    }
    return out;
}

FeatureLayout make_layout(int hours_per_day, std::span<const std::string> exogenous_names) {
    if (hours_per_day < 1) throw Error(Errc::InvalidSpec, "hours_per_day must be positive");
    FeatureLayout layout;
    layout.hours_per_day = hours_per_day;
    layout.exogenous_names.assign(exogenous_names.begin(), exogenous_names.end());
    for (int lag : kPriceLags)
        append_block(layout, "price_lag" + std::to_string(lag), FeatureKind::PriceLag, -1, lag);
    for (int lag : kExogenousLags)
        for (std::size_t k = 0; k < exogenous_names.size(); ++k)
            append_block(layout, exogenous_block(exogenous_names[k], lag), FeatureKind::Exogenous,
                         static_cast<int>(k), lag);
    for (int w = 0; w < 7; ++w)
        layout.features.push_back(
            {"dow_" + std::to_string(w + 1), "dow", FeatureKind::DayOfWeek, -1, 0, w});
    return layout;
}

Vector build_feature_vector(const PanelDataset& data, int day) {
    const auto names = data.exogenous_names();
    const auto layout = make_layout(data.hours_per_day, names);
    const std::vector<SeriesTransform> identity(names.size());
    return feature_row(data, layout, day, SeriesTransform{}, identity);
}

Design build_design(const PanelDataset& data, DayRange window, const DesignOptions& options) {
    if (window.size() < 1) throw Error(Errc::EmptyDesign, "empty calibration window");
    check_day(data, window.first);
    check_day(data, window.last);
    const int H = data.hours_per_day;
    const int N = window.size();

    Design design;
    design.layout = make_layout(H, data.exogenous_names());
    design.window = window;
    design.options = options;

    const int span_first = window.first - kFirstFeatureDay;
    const int span_days = window.last - span_first + 1;
    const auto fit_on_span = [&](const Matrix& values, bool enabled) {
        SeriesTransform tf;
        tf.enabled = enabled;
        if (enabled) {
            const Matrix block = values.middleRows(span_first, span_days);
            tf.scaler = fit_scaler(std::span<const double>(block.data(), block.size()));
        }
        return tf;
    };
    design.price_transform = fit_on_span(data.prices, options.transform_prices);
    for (const auto& s : data.exogenous)
        design.exogenous_transforms.push_back(fit_on_span(s.values, options.transform_exogenous));

    const int M = design.layout.width();
    Matrix raw(N, M);
    for (int i = 0; i < N; ++i)
        raw.row(i) = feature_row(data, design.layout, window.first + i, design.price_transform,
                                 design.exogenous_transforms)
                         .transpose();

    std::vector<double> means, scales;
    for (int j = 0; j < M; ++j) {
        const auto col = raw.col(j);
        if (design.layout.features[j].kind == FeatureKind::DayOfWeek) {
            if (col.cwiseAbs().maxCoeff() == 0.0) {
                design.dropped.push_back(j);
                continue;
            }
            design.kept.push_back(j);
            means.push_back(0.0);
            scales.push_back(1.0);
            continue;
        }
        const double mean = col.mean();
        const double scale = std::sqrt((col.array() - mean).square().mean());
        if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) {
            design.dropped.push_back(j);
            continue;
        }
        design.kept.push_back(j);
        means.push_back(mean);
        scales.push_back(scale);
    }
    const auto kept = static_cast<Eigen::Index>(design.kept.size());
    design.column_mean = Eigen::Map<Vector>(means.data(), kept);
    design.column_scale = Eigen::Map<Vector>(scales.data(), kept);
    design.X.resize(N, kept);
    for (Eigen::Index c = 0; c < kept; ++c)
        design.X.col(c) = (raw.col(design.kept[c]).array() - design.column_mean(c)) /
                          design.column_scale(c);

    design.P.resize(N, H);
    for (int i = 0; i < N; ++i)
        design.P.row(i) = design.transformed_prices(data, window.first + i).transpose();
    design.target_mean = design.P.colwise().mean().transpose();
    design.P.rowwise() -= design.target_mean.transpose();
    if (!design.X.allFinite() || !design.P.allFinite())
        throw Error(Errc::NonFiniteInput, "design contains non-finite values");
    return design;
}

Vector Design::row(const PanelDataset& data, int day) const {
    const Vector raw =
        feature_row(data, layout, day, price_transform, exogenous_transforms);
    Vector out(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        const auto i = static_cast<Eigen::Index>(c);
        out(i) = (raw(kept[c]) - column_mean(i)) / column_scale(i);
    }
    return out;
}

Vector Design::transformed_prices(const PanelDataset& data, int day) const {
    if (day < 0 || day >= data.n_days())
        throw Error(Errc::InsufficientData, "day " + std::to_string(day) + " beyond the panel");
    Vector out(data.hours_per_day);
    for (int h = 0; h < data.hours_per_day; ++h) out(h) = price_transform.forward(data.prices(day, h));
    return out;
}

Vector Design::to_price_units(const Vector& transformed) const {
    return transformed.unaryExpr([this](double t) { return price_transform.backward(t); });
}

Matrix Design::expand(const Matrix& kept_coefficients) const {
    Matrix out = Matrix::Zero(layout.width(), kept_coefficients.cols());
    for (std::size_t c = 0; c < kept.size(); ++c)
        out.row(kept[c]) = kept_coefficients.row(static_cast<Eigen::Index>(c));
    return out;
}

} // namespace cinglear
