#include "gkp/optim.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gkp/errors.hpp"

namespace gkp {
namespace {

constexpr char kStoreMagic[8] = {'G', 'K', 'P', 'S', 'T', 'O', '0', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_raw(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

Tensor& ParamStore::add(const std::string& name, Tensor initial) {
    if (contains(name)) throw ContractViolation("ParamStore: duplicate parameter '" + name + "'");
    index_.emplace(name, slots_.size());
    names_.push_back(name);
    Slot slot;
    slot.grad = Tensor(initial.shape(), 0.0);
    slot.value = std::move(initial);
    slots_.push_back(std::move(slot));
    return slots_.back().value;
}

std::size_t ParamStore::slot_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ContractViolation("ParamStore: unknown parameter '" + name + "'");
    return it->second;
}

Tensor& ParamStore::param(const std::string& name) { return slots_[slot_of(name)].value; }
const Tensor& ParamStore::param(const std::string& name) const { return slots_[slot_of(name)].value; }
Tensor& ParamStore::grad(const std::string& name) { return slots_[slot_of(name)].grad; }
const Tensor& ParamStore::grad(const std::string& name) const { return slots_[slot_of(name)].grad; }

std::size_t ParamStore::total_parameters() const {
    std::size_t total = 0;
    for (const Slot& s : slots_) total += s.value.size();
    return total;
}

void ParamStore::zero_grads() {
    for (Slot& s : slots_) s.grad.fill(0.0);
}

double ParamStore::squared_param_norm() const {
    double total = 0.0;
    for (const Slot& s : slots_) total += s.value.squared_norm();
    return total;
}

double ParamStore::squared_grad_norm() const {
    double total = 0.0;
    for (const Slot& s : slots_) total += s.grad.squared_norm();
    return total;
}

bool ParamStore::bitwise_equal(const ParamStore& other) const {
    if (names_ != other.names_) return false;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        if (slots_[i].value.shape() != other.slots_[i].value.shape()) return false;
        if (std::memcmp(slots_[i].value.data(), other.slots_[i].value.data(),
                        slots_[i].value.size() * sizeof(double)) != 0)
            return false;
    }
    return true;
}

void ParamStore::save_stream(std::ostream& out) const {
    out.write(kStoreMagic, sizeof(kStoreMagic));
    write_raw(out, static_cast<std::uint64_t>(slots_.size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
        const std::string& name = names_[i];
        const Tensor& t = slots_[i].value;
        write_raw(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_raw(out, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape()) write_raw(out, static_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
}

ParamStore ParamStore::load_stream(std::istream& in, const std::string& context) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kStoreMagic, sizeof(magic)) != 0)
        throw FormatError(context + ": not a parameter checkpoint");
    std::uint64_t count = 0;
    read_raw(in, count);
    ParamStore store;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint32_t name_len = 0;
        read_raw(in, name_len);
        if (!in || name_len > 4096) throw FormatError(context + ": corrupt tensor name");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        std::uint32_t rank = 0;
        read_raw(in, rank);
        if (!in || rank > 8) throw FormatError(context + ": corrupt tensor rank");
        std::vector<std::size_t> shape(rank);
        for (std::uint32_t d = 0; d < rank; ++d) {
            std::uint64_t dim = 0;
            read_raw(in, dim);
            shape[d] = static_cast<std::size_t>(dim);
        }
        Tensor t{shape};
        in.read(reinterpret_cast<char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw FormatError(context + ": truncated tensor payload");
        store.add(name, std::move(t));
    }
    return store;
}

void ParamStore::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw LoadError("cannot open " + file.string() + " for writing");
    save_stream(out);
    if (!out) throw LoadError("short write to " + file.string());
}

ParamStore ParamStore::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open " + file.string());
    return load_stream(in, file.string());
}

AdamState::AdamState(const ParamStore& params, AdamHyper hyper) : hyper_(hyper) {
    first_moment_.reserve(params.count());
    second_moment_.reserve(params.count());
    for (const std::string& name : params.names()) {
        first_moment_.emplace_back(params.param(name).shape(), 0.0);
        second_moment_.emplace_back(params.param(name).shape(), 0.0);
    }
}

void AdamState::step(ParamStore& params) {
    ++step_;
    const double bias1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(step_));
    const double bias2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(step_));
    for (std::size_t p = 0; p < params.count(); ++p) {
        const std::string& name = params.names()[p];
        Tensor& value = params.param(name);
        const Tensor& g = params.grad(name);
        Tensor& m = first_moment_[p];
        Tensor& v = second_moment_[p];
        for (std::size_t i = 0; i < value.size(); ++i) {
            m[i] = hyper_.beta1 * m[i] + (1.0 - hyper_.beta1) * g[i];
            v[i] = hyper_.beta2 * v[i] + (1.0 - hyper_.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            value[i] -= hyper_.alpha * m_hat / (std::sqrt(v_hat) + hyper_.eps);
        }
    }
}

}  // namespace gkp
