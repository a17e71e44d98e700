#include "cinglear/coefficients.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "cinglear/csv.hpp"
#include "cinglear/errors.hpp"

namespace cinglear {

namespace {

std::string hour_label(int h) {
    std::ostringstream os;
    os << 'h' << std::setw(2) << std::setfill('0') << h + 1;
    return os.str();
}

constexpr const char* kInterceptRow = "(intercept)";

} // namespace

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientMatrix& coefs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << "feature";
    for (int h = 0; h < coefs.n_hours(); ++h) out << ',' << hour_label(h);
    out << '\n';
    for (int j = 0; j < coefs.n_features(); ++j) {
        out << (j < static_cast<int>(coefs.feature_names.size()) ? coefs.feature_names[j]
                                                                 : "f" + std::to_string(j + 1));
        for (int h = 0; h < coefs.n_hours(); ++h) out << ',' << csv::format_double(coefs.B(j, h));
        out << '\n';
    }
    if (coefs.intercept.size() == coefs.B.cols() && coefs.intercept.size() > 0) {
        out << kInterceptRow;
        for (int h = 0; h < coefs.n_hours(); ++h)
            out << ',' << csv::format_double(coefs.intercept(h));
        out << '\n';
    }
}

CoefficientMatrix read_coefficients_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::EmptyInput, path.string() + " is empty");
    const auto header = csv::split_line(line);
    const int hours = static_cast<int>(header.size()) - 1;
    if (hours < 1) throw Error(Errc::ParseError, "coefficient file needs hour columns");

    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::vector<double> intercept;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = csv::split_line(line);
        if (static_cast<int>(fields.size()) != hours + 1)
            throw Error(Errc::ShapeMismatch, "ragged row in " + path.string());
        std::vector<double> values;
        values.reserve(hours);
        for (int h = 0; h < hours; ++h) values.push_back(csv::parse_double(fields[h + 1]));
        if (fields[0] == kInterceptRow) {
            intercept = std::move(values);
        } else {
            names.push_back(fields[0]);
            rows.push_back(std::move(values));
        }
    }
    CoefficientMatrix out;
    out.feature_names = std::move(names);
    out.B.resize(static_cast<Eigen::Index>(rows.size()), hours);
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (int h = 0; h < hours; ++h) out.B(static_cast<Eigen::Index>(j), h) = rows[j][h];
    if (!intercept.empty()) out.intercept = Eigen::Map<Vector>(intercept.data(), hours);
    return out;
}

} // namespace cinglear
