#include "hetnet/ctmc.hpp"

#include <cmath>
#include <stdexcept>

namespace hetnet {

namespace {

void check_chain(const BirthDeathChain& chain) {
    if (chain.birth.size() != chain.death.size())
        throw std::invalid_argument("birth/death rate vectors must have equal length");
    for (double r : chain.birth)
        if (r < 0.0 || !std::isfinite(r))
            throw std::invalid_argument("birth rates must be finite and >= 0");
    for (double r : chain.death)
        if (r < 0.0 || !std::isfinite(r))
            throw std::invalid_argument("death rates must be finite and >= 0");

    // Every reachable state above 0 needs a way back down.
    bool reachable = true;
    for (std::size_t i = 0; i < chain.birth.size(); ++i) {
        reachable = reachable && chain.birth[i] > 0.0;
        if (reachable && chain.death[i] <= 0.0)
            throw std::invalid_argument("reachable state with zero death rate");
    }
}

} // namespace

std::vector<double> steady_state_linear(const BirthDeathChain& chain) {
    check_chain(chain);
    const std::size_t m = chain.birth.size() + 1;

    // Global balance pi * Q = 0 with the last equation replaced by sum(pi)=1.
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t j = 0; j + 1 < m; ++j) {
        // Column j of Q^T (balance equation for state j).
        a[j][j] -= chain.birth[j];
        if (j > 0) a[j][j] -= chain.death[j - 1];
        if (j > 0) a[j][j - 1] += chain.birth[j - 1];
        a[j][j + 1] += chain.death[j];
    }
    for (std::size_t j = 0; j < m; ++j) a[m - 1][j] = 1.0;
    a[m - 1][m] = 1.0;

    // Gaussian elimination with partial pivoting.
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("singular balance system");
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> pi(m);
    for (std::size_t i = 0; i < m; ++i) pi[i] = a[i][m] / a[i][i];
    for (double& p : pi) if (p < 0.0 && p > -1e-12) p = 0.0;
    return pi;
}

std::vector<double> steady_state(const BirthDeathChain& chain) {
    check_chain(chain);
    const std::size_t m = chain.birth.size() + 1;

    // Product form with periodic rescaling so long chains cannot overflow.
    std::vector<double> weight(m);
    weight[0] = 1.0;
    double sum = 1.0;
    for (std::size_t i = 1; i < m; ++i) {
        if (chain.birth[i - 1] == 0.0) {
            weight[i] = 0.0;
            continue;
        }
        weight[i] = weight[i - 1] * chain.birth[i - 1] / chain.death[i - 1];
        sum += weight[i];
        if (sum > 1e250) {
            for (std::size_t k = 0; k <= i; ++k) weight[k] /= sum;
            sum = 1.0;
        }
    }
    sum = 0.0;
    for (double w : weight) sum += w;
    for (double& w : weight) w /= sum;

    if (m <= 101) {
        const auto reference = steady_state_linear(chain);
        for (std::size_t i = 0; i < m; ++i)
            if (std::fabs(weight[i] - reference[i]) > 1e-9)
                throw std::runtime_error("product-form and balance solutions disagree");
    }
    return weight;
}

std::pair<double, double> guard_channel_oracle(double lambda_o, double lambda_h,
                                               double mu_m, int N, int S) {
    if (N < 1 || S < 0) throw std::invalid_argument("guard chain needs N >= 1, S >= 0");
    if (!(mu_m > 0.0)) throw std::invalid_argument("mu_m must be > 0");

    BirthDeathChain chain;
    chain.birth.resize(static_cast<std::size_t>(N + S));
    chain.death.resize(static_cast<std::size_t>(N + S));
    for (int i = 0; i < N + S; ++i) {
        chain.birth[static_cast<std::size_t>(i)] = i < N ? lambda_o + lambda_h : lambda_h;
        chain.death[static_cast<std::size_t>(i)] = (i + 1) * mu_m;
    }
    const auto pi = steady_state(chain);
    double p_block = 0.0;
    for (int i = N; i <= N + S; ++i) p_block += pi[static_cast<std::size_t>(i)];
    return {p_block, pi.back()};
}

} // namespace hetnet
