#ifndef SYMDYN_DATAIO_HPP
#define SYMDYN_DATAIO_HPP

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "symdyn/stats.hpp"
#include "symdyn/timeseries.hpp"

namespace symdyn {

/**
 * Column mapping for survey CSV files. Source headers are renamed through
 * `rename` first, then canonicalized to lower_snake_case. Every column that
 * is not the id or diagnosis column is treated as a symptom.
 */
struct Schema {
    std::string id_col = "id";
    std::string diagnosis_col = "diagnosis";
    std::map<std::string, std::string> rename;
};

/// lower_snake_case canonical form of a header.
inline std::string canonical_name(const std::string& s) {
    std::string out;
    bool pending_sep = false;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            if (pending_sep && !out.empty()) out.push_back('_');
            pending_sep = false;
            out.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        } else {
            pending_sep = true;
        }
    }
    return out;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(trim(cur));
    return fields;
}

inline bool is_missing(const std::string& field) {
    return field.empty() || field == "NA";
}

}  // namespace detail

/**
 * Loads a survey CSV. Rows are grouped by individual in file order; any row
 * with a missing symptom value (empty cell or the literal NA) is dropped for
 * that individual. Diagnosis labels must be one of GAD, MDD, COMORBID and
 * must not change within an individual.
 */
inline Dataset load_dataset(const std::string& path,
                            const Schema& schema = Schema{}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file: " + path);

    auto headers = detail::split_csv_line(line);
    int id_idx = -1, diag_idx = -1;
    std::vector<int> symptom_cols;
    std::vector<std::string> symptom_names;
    for (std::size_t j = 0; j < headers.size(); ++j) {
        std::string h = headers[j];
        auto it = schema.rename.find(h);
        if (it != schema.rename.end()) h = it->second;
        if (h == schema.id_col) {
            if (id_idx >= 0) throw DataError("duplicate id column");
            id_idx = static_cast<int>(j);
        } else if (h == schema.diagnosis_col) {
            if (diag_idx >= 0) throw DataError("duplicate diagnosis column");
            diag_idx = static_cast<int>(j);
        } else {
            std::string canon = canonical_name(h);
            if (canon.empty())
                throw DataError("unusable column header: '" + h + "'");
            for (const auto& seen : symptom_names)
                if (seen == canon)
                    throw DataError("duplicate symptom column: " + canon);
            symptom_cols.push_back(static_cast<int>(j));
            symptom_names.push_back(canon);
        }
    }
    if (id_idx < 0) throw DataError("missing id column '" + schema.id_col + "'");
    if (diag_idx < 0)
        throw DataError("missing diagnosis column '" + schema.diagnosis_col + "'");
    if (symptom_cols.empty()) throw DataError("no symptom columns found");

    Dataset ds;
    ds.symptoms = symptom_names;
    std::map<std::string, std::size_t> index_of;
    std::vector<std::vector<std::vector<double>>> rows_by_ind;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != headers.size())
            throw DataError("row " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(headers.size()));
        const std::string& id = fields[id_idx];
        if (id.empty())
            throw DataError("row " + std::to_string(line_no) + " has empty id");
        Diagnosis diag = parse_diagnosis(fields[diag_idx]);

        auto it = index_of.find(id);
        if (it == index_of.end()) {
            index_of[id] = ds.individuals.size();
            Individual ind;
            ind.id = id;
            ind.diagnosis = diag;
            ds.individuals.push_back(ind);
            rows_by_ind.emplace_back();
            it = index_of.find(id);
        } else if (ds.individuals[it->second].diagnosis != diag) {
            throw DataError("conflicting diagnosis for individual " + id);
        }

        std::vector<double> row(symptom_cols.size());
        bool missing = false;
        for (std::size_t j = 0; j < symptom_cols.size(); ++j) {
            const std::string& f = fields[symptom_cols[j]];
            if (detail::is_missing(f)) {
                missing = true;
                break;
            }
            try {
                std::size_t pos = 0;
                row[j] = std::stod(f, &pos);
                if (pos != f.size()) throw std::invalid_argument(f);
            } catch (const std::exception&) {
                throw DataError("row " + std::to_string(line_no) +
                                ": cannot parse value '" + f + "'");
            }
        }
        if (!missing) rows_by_ind[it->second].push_back(std::move(row));
    }

    for (std::size_t i = 0; i < ds.individuals.size(); ++i) {
        const auto& rows = rows_by_ind[i];
        TimeSeries ts;
        ts.vars = symptom_names;
        ts.values.resize(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(symptom_names.size()));
        for (std::size_t t = 0; t < rows.size(); ++t)
            for (std::size_t j = 0; j < symptom_names.size(); ++j)
                ts.values(static_cast<Eigen::Index>(t),
                          static_cast<Eigen::Index>(j)) = rows[t][j];
        ds.individuals[i].series = std::move(ts);
    }
    return ds;
}

/**
 * Column standardization with the n-1 variance convention. Throws DataError
 * on a constant column; `label` names the offending column in the message.
 */
inline std::vector<double> zscore(const std::vector<double>& xs,
                                  const std::string& label = "") {
    if (xs.size() < 2) throw DataError("zscore needs at least 2 values");
    const double m = mean(xs);
    const double sd = stddev(xs);
    if (sd == 0.0)
        throw DataError("constant column" + (label.empty() ? "" : ": " + label));
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (xs[i] - m) / sd;
    return out;
}

enum class NormScope { Individual, Pooled };

inline NormScope parse_norm_scope(const std::string& s) {
    if (s == "individual") return NormScope::Individual;
    if (s == "pooled") return NormScope::Pooled;
    throw ConfigError("norm-scope must be 'individual' or 'pooled', got " + s);
}

/**
 * Z-scores every symptom column. Individual scope standardizes each
 * individual's series separately; pooled scope computes column statistics
 * over all individuals' rows and applies them everywhere.
 */
inline Dataset normalize(const Dataset& ds,
                         NormScope scope = NormScope::Individual) {
    Dataset out = ds;
    const std::size_t n_sym = ds.symptoms.size();
    if (scope == NormScope::Individual) {
        for (auto& ind : out.individuals) {
            for (std::size_t j = 0; j < n_sym; ++j) {
                auto col = ind.series.column(static_cast<int>(j));
                auto z = zscore(col, ds.symptoms[j] + " (" + ind.id + ")");
                for (std::size_t t = 0; t < z.size(); ++t)
                    ind.series.values(static_cast<Eigen::Index>(t),
                                      static_cast<Eigen::Index>(j)) = z[t];
            }
        }
    } else {
        for (std::size_t j = 0; j < n_sym; ++j) {
            std::vector<double> pooled;
            for (const auto& ind : ds.individuals) {
                auto col = ind.series.column(static_cast<int>(j));
                pooled.insert(pooled.end(), col.begin(), col.end());
            }
            if (pooled.size() < 2)
                throw DataError("not enough rows to normalize " + ds.symptoms[j]);
            const double m = mean(pooled);
            const double sd = stddev(pooled);
            if (sd == 0.0) throw DataError("constant column: " + ds.symptoms[j]);
            for (auto& ind : out.individuals)
                for (Eigen::Index t = 0; t < ind.series.values.rows(); ++t)
                    ind.series.values(t, static_cast<Eigen::Index>(j)) =
                        (ind.series.values(t, static_cast<Eigen::Index>(j)) - m) /
                        sd;
        }
    }
    return out;
}

}  // namespace symdyn

#endif  // SYMDYN_DATAIO_HPP
