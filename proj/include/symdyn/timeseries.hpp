#ifndef SYMDYN_TIMESERIES_HPP
#define SYMDYN_TIMESERIES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "symdyn/errors.hpp"

namespace symdyn {

/**
 * A multivariate time series: rows are time steps, columns are variables.
 */
struct TimeSeries {
    std::vector<std::string> vars;
    Eigen::MatrixXd values;  // T x N

    int length() const { return static_cast<int>(values.rows()); }
    int n_vars() const { return static_cast<int>(values.cols()); }

    int var_index(const std::string& name) const {
        auto it = std::find(vars.begin(), vars.end(), name);
        if (it == vars.end()) throw DataError("unknown variable: " + name);
        return static_cast<int>(it - vars.begin());
    }

    std::vector<double> column(int j) const {
        std::vector<double> out(values.rows());
        for (Eigen::Index t = 0; t < values.rows(); ++t) out[t] = values(t, j);
        return out;
    }
};

enum class Diagnosis { GAD, MDD, Comorbid };

inline std::string diagnosis_name(Diagnosis d) {
    switch (d) {
        case Diagnosis::GAD: return "GAD";
        case Diagnosis::MDD: return "MDD";
        default: return "COMORBID";
    }
}

inline Diagnosis parse_diagnosis(const std::string& s) {
    if (s == "GAD") return Diagnosis::GAD;
    if (s == "MDD") return Diagnosis::MDD;
    if (s == "COMORBID") return Diagnosis::Comorbid;
    throw DataError("unknown diagnosis label: " + s);
}

struct Individual {
    std::string id;
    Diagnosis diagnosis = Diagnosis::GAD;
    TimeSeries series;
};

struct Dataset {
    std::vector<std::string> symptoms;  // canonical column order
    std::vector<Individual> individuals;

    int total_rows() const {
        int n = 0;
        for (const auto& ind : individuals) n += ind.series.length();
        return n;
    }

    const Individual& by_id(const std::string& id) const {
        for (const auto& ind : individuals)
            if (ind.id == id) return ind;
        throw DataError("unknown individual id: " + id);
    }
};

}  // namespace symdyn

#endif  // SYMDYN_TIMESERIES_HPP
