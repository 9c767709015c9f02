#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fgsim/error.hpp"

namespace fgsim {

enum class Frequency { Monthly, Quarterly };

constexpr int periods_per_year(Frequency f) noexcept { return f == Frequency::Monthly ? 12 : 4; }

inline std::string_view to_string(Frequency f) noexcept {
    return f == Frequency::Monthly ? "monthly" : "quarterly";
}

/// A calendar month or quarter, stored as a running ordinal so arithmetic
/// and comparison are trivial. Serialized as "YYYY-MM" or "YYYYQn".
class Period {
public:
    Period() = default;
    Period(Frequency freq, int year, int subperiod) : freq_(freq) {
        if (subperiod < 1 || subperiod > periods_per_year(freq)) {
            throw ValidationError("subperiod " + std::to_string(subperiod) + " out of range for " +
                                  std::string(fgsim::to_string(freq)) + " data");
        }
        ordinal_ = year * periods_per_year(freq) + (subperiod - 1);
    }

    static Period from_ordinal(Frequency freq, long ordinal) {
        Period p;
        p.freq_ = freq;
        p.ordinal_ = ordinal;
        return p;
    }

    /// Accepts "YYYY-MM", "YYYY-MM-DD" and "YYYYQn". ISO dates are mapped
    /// onto the requested frequency; when none is given it is inferred.
    static Period parse(std::string_view text, std::optional<Frequency> freq = std::nullopt);

    Frequency freq() const noexcept { return freq_; }
    long ordinal() const noexcept { return ordinal_; }
    int year() const noexcept { return static_cast<int>(floor_div(ordinal_, periods_per_year(freq_))); }
    int subperiod() const noexcept {
        const long n = periods_per_year(freq_);
        return static_cast<int>(ordinal_ - floor_div(ordinal_, n) * n) + 1;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << std::setfill('0') << std::setw(4) << year();
        if (freq_ == Frequency::Monthly) {
            os << '-' << std::setw(2) << subperiod();
        } else {
            os << 'Q' << subperiod();
        }
        return os.str();
    }

    Period operator+(long n) const { return from_ordinal(freq_, ordinal_ + n); }
    Period operator-(long n) const { return from_ordinal(freq_, ordinal_ - n); }
    long operator-(const Period& other) const {
        require_same_freq(other);
        return ordinal_ - other.ordinal_;
    }
    bool operator==(const Period& other) const noexcept {
        return freq_ == other.freq_ && ordinal_ == other.ordinal_;
    }
    auto operator<=>(const Period& other) const {
        require_same_freq(other);
        return ordinal_ <=> other.ordinal_;
    }

private:
    static long floor_div(long a, long b) noexcept { return a >= 0 ? a / b : -((-a + b - 1) / b); }

    void require_same_freq(const Period& other) const {
        if (freq_ != other.freq_) throw ValidationError("cannot compare monthly and quarterly periods");
    }

    Frequency freq_ = Frequency::Monthly;
    long ordinal_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

}  // namespace detail

inline Period Period::parse(std::string_view text, std::optional<Frequency> freq) {
    text = detail::trim(text);
    const auto fail = [&]() -> Period { throw ValidationError("unparseable date '" + std::string(text) + "'"); };
    if (text.size() < 6) return fail();
    const auto year = detail::parse_int(text.substr(0, 4));
    if (!year) return fail();

    if (text[4] == 'Q' || text[4] == 'q') {
        const auto q = detail::parse_int(text.substr(5));
        if (!q) return fail();
        if (freq == Frequency::Monthly) {
            throw ValidationError("quarterly date '" + std::string(text) + "' in monthly data");
        }
        return Period(Frequency::Quarterly, *year, *q);
    }
    if (text[4] != '-') return fail();
    const auto rest = text.substr(5);
    const auto month = detail::parse_int(rest.substr(0, std::min<std::size_t>(2, rest.size())));
    if (!month || *month < 1 || *month > 12) return fail();
    if (rest.size() > 2) {
        if (rest[2] != '-' || !detail::parse_int(rest.substr(3))) return fail();
    }
    if (freq == Frequency::Quarterly) return Period(Frequency::Quarterly, *year, (*month - 1) / 3 + 1);
    return Period(Frequency::Monthly, *year, *month);
}

/// Dated fixed-frequency series with an explicit missing-value mask.
/// Immutable once built.
class TimeSeries {
public:
    TimeSeries(std::string name, Period start, std::vector<double> values, std::vector<bool> missing)
        : name_(std::move(name)), start_(start), values_(std::move(values)), missing_(std::move(missing)) {
        if (values_.empty()) throw ValidationError("series '" + name_ + "' is empty");
        if (values_.size() != missing_.size()) {
            throw ValidationError("series '" + name_ + "': values and mask differ in length");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (missing_[i]) {
                values_[i] = 0.0;
            } else if (!std::isfinite(values_[i])) {
                throw ValidationError("series '" + name_ + "': non-finite value at " + period(i).to_string());
            }
        }
    }

    /// Fully observed series.
    TimeSeries(std::string name, Period start, std::vector<double> values)
        : TimeSeries(std::move(name), start, values, std::vector<bool>(values.size(), false)) {}

    /// Series from optionals; std::nullopt marks a missing entry.
    static TimeSeries from_optional(std::string name, Period start, const std::vector<std::optional<double>>& xs) {
        std::vector<double> v(xs.size());
        std::vector<bool> m(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            m[i] = !xs[i].has_value();
            v[i] = xs[i].value_or(0.0);
        }
        return TimeSeries(std::move(name), start, std::move(v), std::move(m));
    }

    const std::string& name() const noexcept { return name_; }
    Frequency freq() const noexcept { return start_.freq(); }
    Period start() const noexcept { return start_; }
    Period end() const { return start_ + static_cast<long>(values_.size()) - 1; }
    std::size_t size() const noexcept { return values_.size(); }
    Period period(std::size_t i) const { return start_ + static_cast<long>(i); }

    bool is_missing(std::size_t i) const { return missing_.at(i); }
    double value(std::size_t i) const {
        if (missing_.at(i)) throw ValidationError("series '" + name_ + "' is missing at " + period(i).to_string());
        return values_[i];
    }
    std::optional<double> at(std::size_t i) const {
        return missing_.at(i) ? std::nullopt : std::optional<double>(values_[i]);
    }
    /// Value at a calendar period, nullopt when outside the range or missing.
    std::optional<double> at(Period p) const {
        const long i = p - start_;
        if (i < 0 || i >= static_cast<long>(size())) return std::nullopt;
        return at(static_cast<std::size_t>(i));
    }

    const std::vector<double>& raw_values() const noexcept { return values_; }
    const std::vector<bool>& missing_mask() const noexcept { return missing_; }
    std::size_t observed_count() const {
        return static_cast<std::size_t>(std::count(missing_.begin(), missing_.end(), false));
    }

    /// Observed values in order, skipping missing entries.
    std::vector<double> observed() const {
        std::vector<double> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) {
            if (!missing_[i]) out.push_back(values_[i]);
        }
        return out;
    }

    TimeSeries renamed(std::string name) const {
        return TimeSeries(std::move(name), start_, values_, missing_);
    }

    /// Sub-range [from, to], both inclusive, clipped to the series.
    TimeSeries slice(Period from, Period to) const {
        const long lo = std::max<long>(0, from - start_);
        const long hi = std::min<long>(static_cast<long>(size()) - 1, to - start_);
        if (lo > hi) throw ValidationError("slice of '" + name_ + "' is empty");
        return TimeSeries(name_, start_ + lo, {values_.begin() + lo, values_.begin() + hi + 1},
                          {missing_.begin() + lo, missing_.begin() + hi + 1});
    }

    bool operator==(const TimeSeries& o) const {
        return name_ == o.name_ && start_ == o.start_ && values_ == o.values_ && missing_ == o.missing_;
    }

private:
    std::string name_;
    Period start_;
    std::vector<double> values_;
    std::vector<bool> missing_;
};

/// Columns sharing frequency, start and length.
class Panel {
public:
    explicit Panel(std::vector<TimeSeries> columns) : columns_(std::move(columns)) {
        if (columns_.empty()) throw ValidationError("panel needs at least one column");
        const auto& first = columns_.front();
        for (const auto& c : columns_) {
            if (c.freq() != first.freq() || !(c.start() == first.start()) || c.size() != first.size()) {
                throw ValidationError("panel column '" + c.name() + "' is not aligned with '" + first.name() + "'");
            }
        }
    }

    std::size_t rows() const noexcept { return columns_.front().size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    Period start() const noexcept { return columns_.front().start(); }
    Frequency freq() const noexcept { return columns_.front().freq(); }
    Period period(std::size_t row) const { return columns_.front().period(row); }

    const std::vector<TimeSeries>& columns() const noexcept { return columns_; }
    const TimeSeries& column(std::size_t i) const { return columns_.at(i); }
    const TimeSeries& column(std::string_view name) const {
        for (const auto& c : columns_) {
            if (c.name() == name) return c;
        }
        throw ValidationError("panel has no column '" + std::string(name) + "'");
    }
    bool has_column(std::string_view name) const {
        return std::any_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.name() == name; });
    }

    bool row_complete(std::size_t row) const {
        return std::none_of(columns_.begin(), columns_.end(), [&](const auto& c) { return c.is_missing(row); });
    }
    std::vector<std::size_t> complete_rows() const {
        std::vector<std::size_t> out;
        for (std::size_t r = 0; r < rows(); ++r) {
            if (row_complete(r)) out.push_back(r);
        }
        return out;
    }

    bool operator==(const Panel& o) const { return columns_ == o.columns_; }

private:
    std::vector<TimeSeries> columns_;
};

// ---------------------------------------------------------------------------
// CSV I/O

namespace detail {

inline std::vector<TimeSeries> parse_csv_table(std::istream& in, std::string_view date_column,
                                               std::optional<Frequency> freq, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(source + ": empty CSV");
    const auto header = split_csv_line(line);
    const auto date_it = std::find(header.begin(), header.end(), date_column);
    if (date_it == header.end()) {
        throw ValidationError(source + ": no date column '" + std::string(date_column) + "'");
    }
    const std::size_t date_idx = static_cast<std::size_t>(date_it - header.begin());

    struct Row {
        Period period;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows;
    std::optional<Frequency> seen = freq;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        }
        const Period p = Period::parse(cells[date_idx], freq);
        if (seen && *seen != p.freq()) throw ValidationError(source + ": mixed frequencies in date column");
        seen = p.freq();
        rows.push_back({p, std::move(cells)});
    }
    if (rows.empty()) throw ValidationError(source + ": no data rows");
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.period < b.period; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].period == rows[i - 1].period) {
            throw ValidationError(source + ": duplicate date " + rows[i].period.to_string());
        }
    }

    const Period start = rows.front().period;
    const auto length = static_cast<std::size_t>(rows.back().period - start + 1);
    std::vector<TimeSeries> out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == date_idx) continue;
        std::vector<std::optional<double>> vals(length);
        bool numeric = true;
        for (const auto& r : rows) {
            const auto& cell = r.cells[c];
            if (cell.empty()) continue;
            const auto v = parse_double(cell);
            if (!v) {
                numeric = false;
                break;
            }
            vals[static_cast<std::size_t>(r.period - start)] = *v;
        }
        if (numeric) out.push_back(TimeSeries::from_optional(header[c], start, vals));
    }
    if (out.empty()) throw ValidationError(source + ": no numeric columns");
    return out;
}

inline std::string format_value(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

}  // namespace detail

/// Reads a CSV with a header row; one series per numeric column. Rows are
/// sorted by date and gaps in the date index become missing entries.
inline std::vector<TimeSeries> load_csv(const std::string& path, std::string_view date_column = "date",
                                        std::optional<Frequency> freq = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return detail::parse_csv_table(in, date_column, freq, path);
}

inline std::vector<TimeSeries> parse_csv(std::string_view text, std::string_view date_column = "date",
                                         std::optional<Frequency> freq = std::nullopt) {
    std::istringstream in{std::string(text)};
    return detail::parse_csv_table(in, date_column, freq, "<string>");
}

inline const TimeSeries& find_series(const std::vector<TimeSeries>& all, std::string_view name) {
    for (const auto& s : all) {
        if (s.name() == name) return s;
    }
    throw ValidationError("no series named '" + std::string(name) + "'");
}

/// Writes series over the union of their date ranges; empty cells mark
/// missing values. Values carry 12 significant digits.
inline void write_csv(std::ostream& out, const std::vector<TimeSeries>& series, std::string_view date_column = "date") {
    if (series.empty()) throw ValidationError("nothing to write");
    Period lo = series.front().start();
    Period hi = series.front().end();
    for (const auto& s : series) {
        if (s.freq() != lo.freq()) throw ValidationError("cannot write mixed frequencies to one CSV");
        lo = std::min(lo, s.start());
        hi = std::max(hi, s.end());
    }
    out << date_column;
    for (const auto& s : series) out << ',' << s.name();
    out << '\n';
    for (Period p = lo; p <= hi; p = p + 1) {
        out << p.to_string();
        for (const auto& s : series) {
            out << ',';
            if (const auto v = s.at(p)) out << detail::format_value(*v);
        }
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const std::vector<TimeSeries>& series,
                      std::string_view date_column = "date") {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_csv(out, series, date_column);
    if (!out) throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// Transforms

/// k-th difference; the output is k entries shorter.
inline TimeSeries diff(const TimeSeries& s, std::size_t k = 1) {
    if (k == 0) throw ValidationError("diff lag must be positive");
    if (s.size() <= k) {
        throw ValidationError("series '" + s.name() + "' needs more than " + std::to_string(k) + " observations to difference");
    }
    std::vector<std::optional<double>> out(s.size() - k);
    for (std::size_t i = k; i < s.size(); ++i) {
        const auto a = s.at(i);
        const auto b = s.at(i - k);
        if (a && b) out[i - k] = *a - *b;
    }
    return TimeSeries::from_optional(s.name() + "_diff", s.period(k), out);
}

/// Trailing mean; the first window-1 entries (and any window touching a
/// missing value) are missing.
inline TimeSeries moving_average(const TimeSeries& s, std::size_t window) {
    if (window == 0) throw ValidationError("moving-average window must be positive");
    if (s.size() < window) throw ValidationError("series '" + s.name() + "' is shorter than the window");
    std::vector<std::optional<double>> out(s.size());
    for (std::size_t i = window - 1; i < s.size(); ++i) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t j = i + 1 - window; j <= i && ok; ++j) {
            if (const auto v = s.at(j)) {
                sum += *v;
            } else {
                ok = false;
            }
        }
        if (ok) out[i] = sum / static_cast<double>(window);
    }
    return TimeSeries::from_optional(s.name() + "_ma" + std::to_string(window), s.start(), out);
}

/// Percent change over `periods`, optionally compounded to an annual rate.
inline TimeSeries pct_change(const TimeSeries& s, std::size_t periods = 1, bool annualize = false) {
    if (periods == 0) throw ValidationError("pct_change periods must be positive");
    const double power = static_cast<double>(periods_per_year(s.freq())) / static_cast<double>(periods);
    std::vector<std::optional<double>> out(s.size());
    for (std::size_t i = periods; i < s.size(); ++i) {
        const auto now = s.at(i);
        const auto then = s.at(i - periods);
        if (!now || !then) continue;
        if (*then == 0.0) {
            throw ValidationError("pct_change of '" + s.name() + "': zero base at " + s.period(i - periods).to_string());
        }
        const double ratio = *now / *then;
        out[i] = annualize ? 100.0 * (std::pow(ratio, power) - 1.0) : 100.0 * (ratio - 1.0);
    }
    return TimeSeries::from_optional(s.name() + "_pct", s.start(), out);
}

/// Restricts every series to the intersection of their date ranges.
inline Panel align(const std::vector<TimeSeries>& series) {
    if (series.empty()) throw ValidationError("align needs at least one series");
    Period lo = series.front().start();
    Period hi = series.front().end();
    for (const auto& s : series) {
        if (s.freq() != lo.freq()) throw ValidationError("align: mixed frequencies");
        lo = std::max(lo, s.start());
        hi = std::min(hi, s.end());
    }
    if (hi < lo) throw ValidationError("align: date ranges do not overlap");
    std::vector<TimeSeries> cols;
    cols.reserve(series.size());
    for (const auto& s : series) cols.push_back(s.slice(lo, hi));
    return Panel(std::move(cols));
}

enum class Aggregation { Mean, Last };

/// Monthly to quarterly. Quarters with any missing month are missing.
inline TimeSeries to_quarterly(const TimeSeries& s, Aggregation how = Aggregation::Mean) {
    if (s.freq() == Frequency::Quarterly) return s;
    const Period q0 = Period::from_ordinal(Frequency::Quarterly, s.start().year() * 4L + (s.start().subperiod() - 1) / 3);
    const Period q1 = Period::from_ordinal(Frequency::Quarterly, s.end().year() * 4L + (s.end().subperiod() - 1) / 3);
    std::vector<std::optional<double>> out;
    for (Period q = q0; q <= q1; q = q + 1) {
        const Period m0(Frequency::Monthly, q.year(), (q.subperiod() - 1) * 3 + 1);
        std::optional<double> acc = 0.0;
        for (int j = 0; j < 3 && acc; ++j) {
            const auto v = s.at(m0 + j);
            if (!v) {
                acc.reset();
            } else if (how == Aggregation::Mean) {
                *acc += *v / 3.0;
            } else {
                acc = *v;
            }
        }
        out.push_back(acc);
    }
    return TimeSeries::from_optional(s.name(), q0, out);
}

}  // namespace fgsim
