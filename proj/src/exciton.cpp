#include "sqzppf/exciton.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "parallel.hpp"

namespace sqzppf {

const char* polarization_name(Polarization p) { return p == Polarization::SigmaPlus ? "sigma+" : "sigma-"; }

std::string ExcitonLevel::label() const {
    std::string s;
    s += character == Character::Bright ? 'B' : 'D';
    s += species == Species::A ? 'A' : 'B';
    s += valley > 0 ? '+' : '-';
    return s;
}

ComplexMatrix ExcitonModel::effective_hamiltonian() const {
    ComplexMatrix h = hamiltonian_;
    for (std::size_t n = 0; n < levels_.size(); ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        h(i, i) -= Complex(0.0, levels_[n].width);
    }
    return h;
}

bool ExcitonModel::zero_widths() const {
    for (const auto& l : levels_)
        if (l.width != 0.0) return false;
    return true;
}

std::optional<std::size_t> ExcitonModel::level_index(const std::string& label) const {
    for (std::size_t n = 0; n < levels_.size(); ++n)
        if (levels_[n].label() == label) return n;
    return std::nullopt;
}

std::string ExcitonModel::biexciton_label(std::size_t f) const {
    const auto& b = biexcitons_.at(f);
    return levels_[b.first].label() + ";" + levels_[b.second].label();
}

ExcitonModel ExcitonModel::build(const ExcitonConfig& config) {
    ExcitonModel m;
    m.config_ = config;

    std::vector<ExcitonLevel> all;
    for (Species sp : {Species::A, Species::B}) {
        const double eb = sp == Species::A ? config.bright_energy_A : config.bright_energy_B;
        const double off = sp == Species::A ? config.dark_offset_A : config.dark_offset_B;
        for (Character ch : {Character::Bright, Character::Dark})
            for (int v : {1, -1}) {
                ExcitonLevel l;
                l.species = sp;
                l.character = ch;
                l.valley = v;
                l.energy = ch == Character::Bright ? eb : eb + off;
                l.width = ch == Character::Bright ? config.bright_width : config.dark_width;
                all.push_back(l);
            }
    }
    if (config.levels.empty()) {
        m.levels_ = all;
    } else {
        for (const auto& want : config.levels) {
            bool found = false;
            for (const auto& l : all)
                if (l.label() == want) {
                    m.levels_.push_back(l);
                    found = true;
                }
            if (!found) throw Error(ErrorCode::InvalidArgument, "unknown exciton level '" + want + "'");
        }
    }
    for (const auto& l : m.levels_) {
        if (!(l.energy > 0.0)) throw Error(ErrorCode::InvalidArgument, "level " + l.label() + " needs energy > 0");
        if (!(l.width >= 0.0)) throw Error(ErrorCode::InvalidArgument, "level " + l.label() + " needs width >= 0");
    }

    const auto n = static_cast<Eigen::Index>(m.levels_.size());
    m.hamiltonian_ = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m.hamiltonian_(i, i) = m.levels_[static_cast<std::size_t>(i)].energy;

    const auto idx = [&](Character ch, Species sp, int v) -> std::optional<Eigen::Index> {
        for (std::size_t k = 0; k < m.levels_.size(); ++k) {
            const auto& l = m.levels_[k];
            if (l.character == ch && l.species == sp && l.valley == v) return static_cast<Eigen::Index>(k);
        }
        return std::nullopt;
    };
    for (Species sp : {Species::A, Species::B}) {
        const double J = sp == Species::A ? config.exchange_J_A : config.exchange_J_B;
        const double g = sp == Species::A ? config.bright_dark_g_A : config.bright_dark_g_B;
        const auto bp = idx(Character::Bright, sp, 1), bm = idx(Character::Bright, sp, -1);
        if (bp && bm) m.hamiltonian_(*bp, *bm) = m.hamiltonian_(*bm, *bp) = J;
        for (int v : {1, -1}) {
            const auto b = idx(Character::Bright, sp, v), d = idx(Character::Dark, sp, v);
            if (b && d) m.hamiltonian_(*b, *d) = m.hamiltonian_(*d, *b) = g;
        }
    }

    std::map<std::pair<Eigen::Index, Eigen::Index>, Complex> given;
    for (const auto& c : config.couplings) {
        const auto from = m.level_index(c.from), to = m.level_index(c.to);
        if (!from || !to) throw Error(ErrorCode::InvalidArgument, "coupling names unknown level " + c.from + "/" + c.to);
        const auto i = static_cast<Eigen::Index>(*to), j = static_cast<Eigen::Index>(*from);
        if (i == j && c.value.imag() != 0.0)
            throw Error(ErrorCode::InvalidArgument, "non-Hermitian coupling: diagonal entry " + c.to + " is complex");
        const auto mirror = given.find({j, i});
        if (mirror != given.end() && std::abs(mirror->second - std::conj(c.value)) > 0.0)
            throw Error(ErrorCode::InvalidArgument, "non-Hermitian coupling between " + c.from + " and " + c.to);
        given[{i, j}] = c.value;
        if (i == j) {
            m.hamiltonian_(i, i) += c.value.real();
        } else {
            m.hamiltonian_(i, j) = c.value;
            m.hamiltonian_(j, i) = std::conj(c.value);
        }
    }

    for (std::size_t i = 0; i < m.levels_.size(); ++i) {
        for (std::size_t j = i; j < m.levels_.size(); ++j) {
            const auto& a = m.levels_[i];
            const auto& b = m.levels_[j];
            double delta = 0.0;
            if (i == j) {
                if (!config.intravalley_pairs || a.character != Character::Bright) continue;
                delta = a.species == Species::A ? config.intravalley_binding_A : config.intravalley_binding_B;
            } else if (a.species == b.species) {
                if (a.valley == b.valley) continue;
                if (a.character != b.character)
                    delta = a.species == Species::A ? config.binding_dark_bright_A : config.binding_dark_bright_B;
                else
                    delta = a.species == Species::A ? config.binding_AA : config.binding_BB;
            } else {
                delta = config.binding_AB;
            }
            BiexcitonState s;
            s.first = i;
            s.second = j;
            s.binding = delta;
            s.energy = m.hamiltonian_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() +
                       m.hamiltonian_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real() - delta;
            if (!(s.energy - config.ground_energy > 0.0))
                throw Error(ErrorCode::InvalidArgument, "biexciton " + a.label() + ";" + b.label() +
                                                            " has non-positive binding-shifted energy");
            m.biexcitons_.push_back(s);
        }
    }
    return m;
}

DipoleCoupling dipole_raise(const ExcitonModel& model, Polarization pol) {
    const auto& lv = model.levels();
    const auto& bx = model.biexcitons();
    const int v = valley_of(pol);
    DipoleCoupling d;
    d.polarization = pol;
    d.ground_to_single = ComplexVector::Zero(static_cast<Eigen::Index>(lv.size()));
    d.single_to_biexciton =
        ComplexMatrix::Zero(static_cast<Eigen::Index>(bx.size()), static_cast<Eigen::Index>(lv.size()));
    const auto bright = [&](std::size_t k) { return lv[k].character == Character::Bright && lv[k].valley == v; };
    for (std::size_t k = 0; k < lv.size(); ++k)
        if (bright(k)) d.ground_to_single(static_cast<Eigen::Index>(k)) = model.dipole_strength(lv[k].species);
    for (std::size_t f = 0; f < bx.size(); ++f) {
        const auto i = bx[f].first, j = bx[f].second;
        const auto row = static_cast<Eigen::Index>(f);
        if (i == j) {
            if (bright(i))
                d.single_to_biexciton(row, static_cast<Eigen::Index>(i)) = std::sqrt(2.0) * model.dipole_strength(lv[i].species);
            continue;
        }
        if (bright(j)) d.single_to_biexciton(row, static_cast<Eigen::Index>(i)) += model.dipole_strength(lv[j].species);
        if (bright(i)) d.single_to_biexciton(row, static_cast<Eigen::Index>(j)) += model.dipole_strength(lv[i].species);
    }
    return d;
}

Propagator::Propagator(const ExcitonModel& model) {
    if (model.zero_widths()) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(model.hamiltonian());
        if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "Hermitian eigendecomposition failed");
        eigenvalues_ = es.eigenvalues().cast<Complex>();
        eigenvectors_ = es.eigenvectors();
        inverse_ = eigenvectors_.adjoint();
        condition_ = 1.0;
        return;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(model.effective_hamiltonian());
    if (es.info() != Eigen::Success) throw Error(ErrorCode::Numerical, "eigendecomposition failed");
    eigenvalues_ = es.eigenvalues();
    eigenvectors_ = es.eigenvectors();
    Eigen::JacobiSVD<ComplexMatrix> svd(eigenvectors_);
    const auto& s = svd.singularValues();
    condition_ = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : INFINITY;
    if (!std::isfinite(condition_) || condition_ > 1e12) {
        std::ostringstream os;
        os << "eigenvector matrix is ill-conditioned (cond = " << condition_
           << "); the effective Hamiltonian is close to an exceptional point";
        throw Error(ErrorCode::Numerical, os.str());
    }
    inverse_ = eigenvectors_.fullPivLu().inverse();
}

ComplexMatrix Propagator::at(double t) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "propagation time must be >= 0");
    ComplexVector ph(eigenvalues_.size());
    for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(Complex(0.0, -1.0) * eigenvalues_(k) * t);
    return eigenvectors_ * ph.asDiagonal() * inverse_;
}

ComplexVector Propagator::apply(double t, const ComplexVector& psi) const {
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "propagation time must be >= 0");
    ComplexVector c = inverse_ * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(Complex(0.0, -1.0) * eigenvalues_(k) * t);
    return eigenvectors_ * c;
}

ComplexMatrix propagate(const ExcitonModel& model, double t) { return Propagator(model).at(t); }

DoorwayTable doorway_amplitudes(const ExcitonModel& model, Polarization pol_s, Polarization pol_i,
                                const Grid1D& t_grid, int threads) {
    const DipoleCoupling ds = dipole_raise(model, pol_s);
    return doorway_amplitudes(model, ds.ground_to_single, pol_i, t_grid, Frame::Lab, threads);
}

DoorwayTable doorway_amplitudes(const ExcitonModel& model, const ComplexVector& initial, Polarization pol_i,
                                const Grid1D& t_grid, Frame frame, int threads) {
    if (model.biexcitons().empty()) throw Error(ErrorCode::InvalidArgument, "biexciton manifold is empty");
    if (t_grid.unit() != Unit::InverseElectronVolt)
        throw Error(ErrorCode::UnitMismatch, "doorway time grid must be internal time (1/eV)");
    if (!(t_grid.start() >= 0.0)) throw Error(ErrorCode::InvalidArgument, "doorway time grid must start at t >= 0");
    if (initial.size() != static_cast<Eigen::Index>(model.levels().size()))
        throw Error(ErrorCode::InvalidArgument, "initial state has wrong dimension");

    const Propagator prop(model);
    const DipoleCoupling di = dipole_raise(model, pol_i);
    const ComplexVector c0 = prop.inverse_eigenvectors() * initial;
    const ComplexMatrix& V = prop.eigenvectors();
    const ComplexMatrix PV = di.single_to_biexciton * V;
    const auto nl = static_cast<Eigen::Index>(model.levels().size());
    Eigen::VectorXd bare(nl);
    for (Eigen::Index k = 0; k < nl; ++k) bare(k) = model.hamiltonian()(k, k).real();

    DoorwayTable out;
    out.t_grid = t_grid;
    for (const auto& b : model.biexcitons()) out.transition_energies.push_back(b.energy - model.ground_energy());
    out.amplitudes.resize(static_cast<Eigen::Index>(model.biexcitons().size()), static_cast<Eigen::Index>(t_grid.count()));
    const ComplexVector& lam = prop.eigenvalues();
    detail::parallel_for(t_grid.count(), threads, [&](std::size_t n) {
        const double t = t_grid[n];
        ComplexVector c(c0.size());
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = c0(k) * std::exp(Complex(0.0, -1.0) * lam(k) * t);
        if (frame == Frame::Lab) {
            out.amplitudes.col(static_cast<Eigen::Index>(n)) = PV * c;
        } else {
            ComplexVector x = V * c;
            for (Eigen::Index k = 0; k < nl; ++k) x(k) *= std::polar(1.0, bare(k) * t);
            out.amplitudes.col(static_cast<Eigen::Index>(n)) = di.single_to_biexciton * x;
        }
    });
    return out;
}

std::string dump_model(const ExcitonModel& model) {
    using nlohmann::json;
    json j;
    j["ground_energy_eV"] = model.ground_energy();
    json levels = json::array();
    for (const auto& l : model.levels())
        levels.push_back({{"label", l.label()},
                          {"species", l.species == Species::A ? "A" : "B"},
                          {"character", l.character == Character::Bright ? "bright" : "dark"},
                          {"valley", l.valley},
                          {"energy_eV", l.energy},
                          {"width_eV", l.width}});
    j["levels"] = levels;
    const auto& h = model.hamiltonian();
    json re = json::array(), im = json::array();
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        json a = json::array(), b = json::array();
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            a.push_back(h(r, c).real());
            b.push_back(h(r, c).imag());
        }
        re.push_back(a);
        im.push_back(b);
    }
    j["single_hamiltonian_eV"] = {{"real", re}, {"imag", im}};
    json bx = json::array();
    for (std::size_t f = 0; f < model.biexcitons().size(); ++f) {
        const auto& b = model.biexcitons()[f];
        bx.push_back({{"index", f}, {"label", model.biexciton_label(f)}, {"energy_eV", b.energy}, {"binding_eV", b.binding}});
    }
    j["biexcitons"] = bx;
    for (Polarization p : {Polarization::SigmaPlus, Polarization::SigmaMinus}) {
        const auto d = dipole_raise(model, p);
        json g = json::object(), s = json::array();
        for (Eigen::Index k = 0; k < d.ground_to_single.size(); ++k)
            if (d.ground_to_single(k) != Complex(0.0))
                g[model.levels()[static_cast<std::size_t>(k)].label()] = d.ground_to_single(k).real();
        for (Eigen::Index f = 0; f < d.single_to_biexciton.rows(); ++f)
            for (Eigen::Index k = 0; k < d.single_to_biexciton.cols(); ++k)
                if (d.single_to_biexciton(f, k) != Complex(0.0))
                    s.push_back({{"from", model.levels()[static_cast<std::size_t>(k)].label()},
                                 {"to", model.biexciton_label(static_cast<std::size_t>(f))},
                                 {"amplitude", d.single_to_biexciton(f, k).real()}});
        j["dipoles"][polarization_name(p)] = {{"ground_to_single", g}, {"single_to_biexciton", s}};
    }
    return j.dump(2);
}

}  // namespace sqzppf
