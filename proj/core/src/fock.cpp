#include "hybq/fock.hpp"

#include <bit>

#include "hybq/errors.hpp"

namespace hybq {

int SpinOrbital::mode() const {
  if (orbital != 1 && orbital != 2) {
    throw ValidationError("SpinOrbital orbital must be 1 or 2, got " +
                          std::to_string(orbital));
  }
  return 4 * static_cast<int>(dot) + 2 * (orbital - 1) + static_cast<int>(spin);
}

SpinOrbital SpinOrbital::from_mode(int mode) {
  if (mode < 0 || mode >= kNumModes) {
    throw ValidationError("mode index out of range: " + std::to_string(mode));
  }
  SpinOrbital so;
  so.dot = static_cast<Dot>(mode / 4);
  so.orbital = 1 + (mode % 4) / 2;
  so.spin = static_cast<Spin>(mode % 2);
  return so;
}

std::string SpinOrbital::label() const {
  std::string s;
  s += (dot == Dot::Left) ? 'L' : 'R';
  s += static_cast<char>('0' + orbital);
  s += (spin == Spin::Up) ? 'u' : 'd';
  return s;
}

int FockState::count() const { return std::popcount(bits); }

FockState make_fock_state(std::uint64_t bits, int n_modes) {
  FockState st;
  st.bits = bits;
  const int half = n_modes / 2;
  const std::uint64_t lower = (half >= 64) ? ~0ULL : ((1ULL << half) - 1);
  st.charge_config = {std::popcount(bits & lower), std::popcount(bits & ~lower)};
  int up = 0, down = 0;
  for (int m = 0; m < n_modes; ++m) {
    if ((bits >> m) & 1ULL) ((m % 2 == 0) ? up : down)++;
  }
  st.twice_sz = up - down;
  return st;
}

std::shared_ptr<const FockBasis> FockBasis::build(int n_modes, int n_electrons) {
  if (n_modes < 0 || n_modes > 62 || n_electrons < 0 || n_electrons > n_modes) {
    throw ValidationError("FockBasis requires 0 <= n_electrons <= n_modes <= 62");
  }
  auto basis = std::shared_ptr<FockBasis>(new FockBasis());
  basis->n_modes_ = n_modes;
  basis->n_electrons_ = n_electrons;
  if (n_electrons == 0) {
    basis->states_.push_back(make_fock_state(0, n_modes));
  } else {
    // Gosper's hack walks same-popcount words in ascending order.
    const std::uint64_t limit = (n_modes >= 64) ? ~0ULL : (1ULL << n_modes);
    std::uint64_t w = (1ULL << n_electrons) - 1;
    while (w < limit) {
      basis->states_.push_back(make_fock_state(w, n_modes));
      const std::uint64_t c = w & (~w + 1);
      const std::uint64_t r = w + c;
      if (r >= limit || r < w) break;
      w = r | (((w ^ r) >> 2) / c);
    }
  }
  basis->rebuild_index();
  return basis;
}

std::shared_ptr<const FockBasis> FockBasis::filtered(
    const std::function<bool(const FockState&)>& keep) const {
  auto basis = std::shared_ptr<FockBasis>(new FockBasis());
  basis->n_modes_ = n_modes_;
  basis->n_electrons_ = n_electrons_;
  for (const auto& st : states_) {
    if (keep(st)) basis->states_.push_back(st);
  }
  if (basis->states_.empty()) {
    throw ValidationError("filtered basis is empty");
  }
  basis->rebuild_index();
  return basis;
}

void FockBasis::rebuild_index() {
  index_.clear();
  index_.reserve(states_.size());
  for (int i = 0; i < static_cast<int>(states_.size()); ++i) {
    index_.emplace(states_[i].bits, i);
  }
}

std::optional<int> FockBasis::index_of(std::uint64_t bits) const {
  auto it = index_.find(bits);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<AppliedState> apply_fermion(std::uint64_t bits, int mode, FermionOp op,
                                          int n_modes) {
  if (mode < 0 || mode >= n_modes) {
    throw ValidationError("apply_fermion: mode index out of range: " +
                          std::to_string(mode));
  }
  const std::uint64_t flag = 1ULL << mode;
  const bool occ = bits & flag;
  if (op == FermionOp::Create ? occ : !occ) return std::nullopt;
  const std::uint64_t below = bits & (flag - 1);
  AppliedState out;
  out.sign = (std::popcount(below) % 2 == 0) ? 1 : -1;
  out.bits = bits ^ flag;
  return out;
}

std::string state_label(std::uint64_t bits, int n_modes) {
  std::string s = "|";
  bool first = true;
  for (int m = 0; m < n_modes; ++m) {
    if (!((bits >> m) & 1ULL)) continue;
    if (!first) s += ' ';
    first = false;
    if (n_modes == kNumModes) {
      s += SpinOrbital::from_mode(m).label();
    } else {
      s += std::to_string(m / 2);
      s += (m % 2 == 0) ? 'u' : 'd';
    }
  }
  s += ">";
  return s;
}

}  // namespace hybq
