#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace twophase {

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    unsigned max_depth = 18;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt = {});
// Sum over consecutive intervals of an ascending break list.
QuadResult integrate_pieces(const std::function<double(double)>& f, std::span<const double> breaks,
                            const QuadOptions& opt = {});

// Composite 61-point Gauss-Kronrod nodes on equal panels, so integrands sharing
// an expensive factor can reuse its values at the nodes.
struct PanelRule {
    std::vector<double> x;
    std::vector<double> kronrod;
    std::vector<double> gauss;
};
PanelRule gauss_kronrod_panels(double a, double b, int panels);

}  // namespace twophase
