#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqzppf/numerics.hpp"

namespace sqzppf {

enum class Species { A, B };
enum class Character { Bright, Dark };
enum class Polarization { SigmaPlus = 1, SigmaMinus = -1 };

inline int valley_of(Polarization p) { return static_cast<int>(p); }
const char* polarization_name(Polarization p);

struct ExcitonLevel {
    Species species = Species::A;
    Character character = Character::Bright;
    int valley = 1;
    double energy = 0.0;  // eV
    double width = 0.0;   // eV, decay half-width
    /// "BA+", "DB-", ...
    std::string label() const;
};

/// Extra single-exciton matrix element <to|H|from>; the conjugate entry is implied.
struct ExtraCoupling {
    std::string from;
    std::string to;
    Complex value;
    bool operator==(const ExtraCoupling&) const = default;
};

/// Model inputs. Energies in eV.
struct ExcitonConfig {
    double bright_energy_A = 1.6035;
    double bright_energy_B = 2.00285;
    double dark_offset_A = 0.0;
    double dark_offset_B = 0.0;
    double bright_width = 1.0e-3;
    double dark_width = 0.0;
    double exchange_J_A = 1.0e-3;
    double exchange_J_B = 0.5e-3;
    double bright_dark_g_A = 0.7e-3;
    double bright_dark_g_B = 0.5e-3;
    double binding_AA = 27.0e-3;
    double binding_BB = 16.7e-3;
    double binding_AB = 21.8e-3;
    double binding_dark_bright_A = 1.0e-3;
    double binding_dark_bright_B = -4.3e-3;
    bool intravalley_pairs = true;
    double intravalley_binding_A = 53.0e-3;
    double intravalley_binding_B = 35.7e-3;
    double dipole_A = 1.0;
    double dipole_B = 1.0;
    double ground_energy = 0.0;
    /// Level labels to keep; empty keeps all eight.
    std::vector<std::string> levels;
    std::vector<ExtraCoupling> couplings;

    bool operator==(const ExcitonConfig&) const = default;
};

/// Pair of single-exciton levels (first <= second). first == second is a doubly occupied bright level.
struct BiexcitonState {
    std::size_t first = 0;
    std::size_t second = 0;
    double energy = 0.0;
    double binding = 0.0;
};

class ExcitonModel {
public:
    static ExcitonModel build(const ExcitonConfig& config);

    const ExcitonConfig& config() const { return config_; }
    const std::vector<ExcitonLevel>& levels() const { return levels_; }
    const std::vector<BiexcitonState>& biexcitons() const { return biexcitons_; }
    /// Hermitian single-exciton block.
    const ComplexMatrix& hamiltonian() const { return hamiltonian_; }
    /// H - i diag(widths)
    ComplexMatrix effective_hamiltonian() const;
    double ground_energy() const { return config_.ground_energy; }
    bool zero_widths() const;
    std::optional<std::size_t> level_index(const std::string& label) const;
    std::string biexciton_label(std::size_t f) const;
    double dipole_strength(Species s) const { return s == Species::A ? config_.dipole_A : config_.dipole_B; }

private:
    ExcitonConfig config_;
    std::vector<ExcitonLevel> levels_;
    std::vector<BiexcitonState> biexcitons_;
    ComplexMatrix hamiltonian_;
};

/// Raising part of the dipole operator for one circular polarization.
struct DipoleCoupling {
    Polarization polarization = Polarization::SigmaPlus;
    ComplexVector ground_to_single;   // <X|V+|g>
    ComplexMatrix single_to_biexciton;  // <f|V+|X>, rows f
};

DipoleCoupling dipole_raise(const ExcitonModel& model, Polarization pol);

/// exp(-i H_eff t) through an eigendecomposition of the single-exciton block.
class Propagator {
public:
    explicit Propagator(const ExcitonModel& model);

    ComplexMatrix at(double t) const;
    ComplexVector apply(double t, const ComplexVector& psi) const;
    const ComplexVector& eigenvalues() const { return eigenvalues_; }
    const ComplexMatrix& eigenvectors() const { return eigenvectors_; }
    const ComplexMatrix& inverse_eigenvectors() const { return inverse_; }
    double condition_number() const { return condition_; }

private:
    ComplexVector eigenvalues_;
    ComplexMatrix eigenvectors_;
    ComplexMatrix inverse_;
    double condition_ = 1.0;
};

ComplexMatrix propagate(const ExcitonModel& model, double t);

enum class Frame {
    Lab,          // A_f(t) = <f|V+_i U(t) V+_s|g>
    Interaction,  // each intermediate level X demodulated by exp(i E_X t)
};

/// Doorway amplitudes: rows are biexciton states f, columns the t grid (1/eV).
struct DoorwayTable {
    Grid1D t_grid;
    std::vector<double> transition_energies;  // E_f - ground
    ComplexMatrix amplitudes;
};

DoorwayTable doorway_amplitudes(const ExcitonModel& model, Polarization pol_s, Polarization pol_i,
                                const Grid1D& t_grid, int threads = 1);

/// Same with an explicit single-exciton state after the first interaction.
DoorwayTable doorway_amplitudes(const ExcitonModel& model, const ComplexVector& initial, Polarization pol_i,
                                const Grid1D& t_grid, Frame frame, int threads = 1);

/// JSON text with the levels, Hamiltonian blocks, biexciton table and dipole tables.
std::string dump_model(const ExcitonModel& model);

}  // namespace sqzppf
