#include "gfnlab/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnlab {

Adam::Adam(std::vector<std::pair<Parameter*, double>> params_with_lr) {
    slots_.reserve(params_with_lr.size());
    for (auto& [p, lr] : params_with_lr) {
        if (!(lr > 0.0)) throw std::invalid_argument("Adam: learning rate must be positive");
        Slot s;
        s.param = p;
        s.lr = lr;
        s.m = Matrix::Zero(p->value.rows(), p->value.cols());
        s.v = Matrix::Zero(p->value.rows(), p->value.cols());
        slots_.push_back(std::move(s));
    }
}

void Adam::step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (Slot& s : slots_) {
        const Matrix& g = s.param->grad;
        if (g.rows() != s.m.rows() || g.cols() != s.m.cols())
            throw std::invalid_argument("Adam: gradient shape mismatch for " + s.param->name);
        s.m = kBeta1 * s.m + (1.0 - kBeta1) * g;
        s.v = kBeta2 * s.v + (1.0 - kBeta2) * g.cwiseProduct(g);
        s.param->value.array() -=
            s.lr * (s.m.array() / bc1) / ((s.v.array() / bc2).sqrt() + kEps);
        if (!s.param->value.allFinite())
            throw NumericError("non-finite parameter after Adam update: " + s.param->name);
        s.param->zero_grad();
    }
}

}  // namespace gfnlab
