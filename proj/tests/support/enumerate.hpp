#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nearsir/degree_model.hpp"

namespace testoracle {

namespace detail {

//! Jump-chain state: untouched susceptible and recovered vertices by degree,
//! free-half-edge counts of the infective vertices, and the loose free
//! half-edges sitting on no-longer-infectious vertices.
struct State {
    std::vector<int> s;
    std::vector<int> r_unt;
    std::vector<int> inf; // one entry per infective vertex, descending
    int r_pool = 0;

    void canonicalize() {
        inf.erase(std::remove(inf.begin(), inf.end(), 0), inf.end());
        std::sort(inf.begin(), inf.end(), std::greater<int>());
        while (!s.empty() && s.back() == 0) s.pop_back();
        while (!r_unt.empty() && r_unt.back() == 0) r_unt.pop_back();
    }

    std::string key() const {
        std::string k = "s";
        for (int v : s) k += std::to_string(v) + ",";
        k += "|r";
        for (int v : r_unt) k += std::to_string(v) + ",";
        k += "|i";
        for (int v : inf) k += std::to_string(v) + ",";
        k += "|p" + std::to_string(r_pool);
        return k;
    }
};

class Enumerator {
public:
    Enumerator(double beta, double rho) : beta_(beta), rho_(rho) {}

    //! Distribution of the number of further infections from this state.
    std::map<std::int64_t, double> run(State st) {
        st.canonicalize();

        std::int64_t x_s = 0;
        for (std::size_t k = 0; k < st.s.size(); ++k)
            x_s += static_cast<std::int64_t>(k) * st.s[k];
        std::int64_t x_i = 0;
        for (int f : st.inf) x_i += f;
        if (st.inf.empty() || x_s == 0) return {{0, 1.0}};

        const std::string key = st.key();
        const auto hit = memo_.find(key);
        if (hit != memo_.end()) return hit->second;

        std::int64_t x_runt = 0;
        for (std::size_t k = 0; k < st.r_unt.size(); ++k)
            x_runt += static_cast<std::int64_t>(k) * st.r_unt[k];
        const double x = static_cast<double>(x_s + x_i + st.r_pool + x_runt);
        const double m = static_cast<double>(st.inf.size());
        const double p_pair =
            rho_ > 0.0 ? beta_ * static_cast<double>(x_i) /
                             (beta_ * static_cast<double>(x_i) + rho_ * m)
                       : 1.0;

        std::map<std::int64_t, double> out;
        auto descend = [&](State next, double prob, int bump) {
            if (prob <= 0.0) return;
            for (const auto& [z, q] : run(std::move(next)))
                out[z + bump] += prob * q;
        };

        if (rho_ > 0.0) {
            for (std::size_t j = 0; j < st.inf.size(); ++j) {
                State next = st;
                next.r_pool += next.inf[j];
                next.inf[j] = 0;
                descend(std::move(next), (1.0 - p_pair) / m, 0);
            }
        }

        const double partners = x - 1.0;
        for (std::size_t i = 0; i < st.inf.size(); ++i) {
            const double p_i =
                p_pair * static_cast<double>(st.inf[i]) / static_cast<double>(x_i);
            // the initiator's own remaining half-edges: a self-loop
            if (st.inf[i] >= 2) {
                State next = st;
                next.inf[i] -= 2;
                descend(std::move(next), p_i * static_cast<double>(st.inf[i] - 1) / partners, 0);
            }
            // another infective vertex
            for (std::size_t j = 0; j < st.inf.size(); ++j) {
                if (j == i) continue;
                State next = st;
                next.inf[i] -= 1;
                next.inf[j] -= 1;
                descend(std::move(next), p_i * static_cast<double>(st.inf[j]) / partners, 0);
            }
            // an untouched susceptible: one new infection
            for (std::size_t k = 1; k < st.s.size(); ++k) {
                if (st.s[k] == 0) continue;
                State next = st;
                next.s[k] -= 1;
                next.inf[i] -= 1;
                next.inf.push_back(static_cast<int>(k) - 1);
                const double w = static_cast<double>(k) * st.s[k];
                descend(std::move(next), p_i * w / partners, 1);
            }
            // a loose half-edge on a no-longer-infectious vertex
            if (st.r_pool > 0) {
                State next = st;
                next.r_pool -= 1;
                next.inf[i] -= 1;
                descend(std::move(next), p_i * static_cast<double>(st.r_pool) / partners, 0);
            }
            // an untouched initially recovered vertex
            for (std::size_t k = 1; k < st.r_unt.size(); ++k) {
                if (st.r_unt[k] == 0) continue;
                State next = st;
                next.r_unt[k] -= 1;
                next.r_pool += static_cast<int>(k) - 1;
                next.inf[i] -= 1;
                const double w = static_cast<double>(k) * st.r_unt[k];
                descend(std::move(next), p_i * w / partners, 0);
            }
        }
        memo_[key] = out;
        return out;
    }

private:
    double beta_;
    double rho_;
    std::map<std::string, std::map<std::int64_t, double>> memo_;
};

} // namespace detail

//! Exact final-size law of the annealed epidemic on a small degree
//! configuration: free infective half-edges pair at rate beta each with a
//! uniform free partner (the matching is revealed as it is used), infective
//! vertices recover at rate rho. Exhaustive memoized sweep; meant for
//! configurations with at most a dozen half-edges.
inline std::map<std::int64_t, double> final_size_law(const nearsir::DegreeConfiguration& config) {
    detail::State st;
    st.s.assign(config.n_s.begin(), config.n_s.end());
    st.r_unt.assign(config.n_r.begin(), config.n_r.end());
    for (std::size_t k = 1; k < config.n_i.size(); ++k)
        for (std::int64_t c = 0; c < config.n_i[k]; ++c)
            st.inf.push_back(static_cast<int>(k));
    detail::Enumerator e(config.beta, config.rho);
    return e.run(std::move(st));
}

} // namespace testoracle
