#pragma once

#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "pragmarank/errors.hpp"
#include "pragmarank/numerics/tensor.hpp"

namespace prk {

// A named, trainable tensor. Gradient is accumulated by Tape::backward and
// cleared by the optimizer between steps.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;
    bool trainable = true;

    Parameter(std::string n, Tensor v, bool train = true)
        : name(std::move(n)), value(std::move(v)),
          grad(value.rows(), value.cols()), trainable(train) {}

    void zero_grad() { grad.fill(0.0); }
};

// Owns all parameters of a model in creation order. Names are unique.
class ParamStore {
public:
    Parameter& create(const std::string& name, std::size_t rows, std::size_t cols) {
        if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
        params_.push_back(std::make_unique<Parameter>(name, Tensor(rows, cols)));
        index_[name] = params_.size() - 1;
        return *params_.back();
    }

    Parameter& get(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
        return *params_[it->second];
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    std::size_t count() const { return params_.size(); }

    std::vector<Parameter*> all() {
        std::vector<Parameter*> out;
        out.reserve(params_.size());
        for (auto& p : params_) out.push_back(p.get());
        return out;
    }

    void zero_grad() {
        for (auto& p : params_) p->zero_grad();
    }

    // Uniform fan-in init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    void init_uniform(Parameter& p, std::size_t fan_in, std::mt19937_64& rng) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t i = 0; i < p.value.size(); ++i) p.value[i] = dist(rng);
    }

private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace prk
