#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hybq {

// ---------------------------------------------------------------------------
// Mode layout and sign convention (the single normative statement for both).
//
// Spin-orbitals of the two-dot, two-orbital model are numbered dot-major,
// orbital-next, spin-last:
//
//   0 (L,1,up)   1 (L,1,down)   2 (L,2,up)   3 (L,2,down)
//   4 (R,1,up)   5 (R,1,down)   6 (R,2,up)   7 (R,2,down)
//
// More generally, mode 2k is the spin-up and mode 2k+1 the spin-down state of
// "site" k, where a site is a (dot, orbital) pair here or a lattice site for
// chain bases. A basis over M modes holds sites 0..M/2-1; the first half of
// the modes forms group "left", the second half group "right".
//
// Occupation words store mode m in bit m. A Slater determinant |n> is the
// product c†_{m1} c†_{m2} ... |vac> with m1 < m2 < ... in ascending mode
// order, and the fermionic sign of c†_m / c_m acting on |n> is
// (-1)^(number of occupied modes with index < m).
// ---------------------------------------------------------------------------

enum class Dot : int { Left = 0, Right = 1 };
enum class Spin : int { Up = 0, Down = 1 };

struct SpinOrbital {
  Dot dot = Dot::Left;
  int orbital = 1;  // 1 or 2
  Spin spin = Spin::Up;

  int mode() const;
  static SpinOrbital from_mode(int mode);
  std::string label() const;  // e.g. "L1u", "R2d"

  friend bool operator==(const SpinOrbital&, const SpinOrbital&) = default;
};

inline constexpr int kNumModes = 8;  // the double-dot model's mode count

struct FockState {
  std::uint64_t bits = 0;
  std::pair<int, int> charge_config{0, 0};  // electrons in (left, right) half
  int twice_sz = 0;                         // 2*Sz so the value stays integral

  bool occupied(int mode) const { return (bits >> mode) & 1ULL; }
  int count() const;
};

class FockBasis {
 public:
  // All C(n_modes, n_electrons) determinants in ascending numeric order of
  // the occupation word. Requires 0 <= n_electrons <= n_modes <= 62.
  static std::shared_ptr<const FockBasis> build(int n_modes, int n_electrons);

  // Subset of this basis (same mode layout, same state order) satisfying the
  // predicate. Throws ValidationError if the subset is empty.
  std::shared_ptr<const FockBasis> filtered(
      const std::function<bool(const FockState&)>& keep) const;

  int n_modes() const { return n_modes_; }
  int n_electrons() const { return n_electrons_; }
  int size() const { return static_cast<int>(states_.size()); }
  const FockState& state(int i) const { return states_.at(i); }
  const std::vector<FockState>& states() const { return states_; }
  std::optional<int> index_of(std::uint64_t bits) const;

 private:
  FockBasis() = default;
  void rebuild_index();

  int n_modes_ = 0;
  int n_electrons_ = 0;
  std::vector<FockState> states_;
  std::unordered_map<std::uint64_t, int> index_;
};

using FockBasisPtr = std::shared_ptr<const FockBasis>;

enum class FermionOp { Create, Annihilate };

struct AppliedState {
  std::uint64_t bits = 0;
  int sign = 1;  // +1 or -1
};

// c†_mode or c_mode applied to the occupation word; nullopt when the result
// vanishes (creating into an occupied mode / annihilating an empty one).
std::optional<AppliedState> apply_fermion(std::uint64_t bits, int mode, FermionOp op,
                                          int n_modes);

// Labels a state for diagnostics, e.g. "|L1u L1d R1d>" for 8-mode bases or
// "|0u 1d 2d>" for chains.
std::string state_label(std::uint64_t bits, int n_modes);

FockState make_fock_state(std::uint64_t bits, int n_modes);

}  // namespace hybq
