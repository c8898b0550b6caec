#include <benchmark/benchmark.h>

#include "polariton/dispersion.hpp"
#include "polariton/params.hpp"
#include "polariton/scattering.hpp"
#include "polariton/site_dynamics.hpp"

using namespace polariton;

namespace {

ExperimentConfig bench_config() {
  ExperimentConfig c;
  c.wavelength_lambda = 800e-9;
  c.beam_area_A = 800e-9 * 800e-9;
  c.lattice_constant_a = 400e-9;
  c.confinement_f = 10.0;
  c.atoms_per_site_N = 1;
  c.scattering_length_a_pm = 10e-9;
  c.scattering_length_a_pp = 10e-9;
  c.scattering_length_a_mm = 10e-9;
  c.scattering_length_a_g = 5e-9;
  c.scattering_length_a_gp = 5e-9;
  c.scattering_length_a_gm = 5e-9;
  c.atom_mass_m = 8.2825876824250995703e-26;
  c.control_rabi_Omega0 = 2905330.2871295775337;
  c.probe_omega = 2354564459136066.5967;
  c.dipole_mu = 3.584e-29;
  return c;
}

struct Collision {
  EitMedium medium = make_medium(bench_config());
  scattering::InitialCondition ic{scattering::GaussianPulse{-12e-6, 2e-6},
                                  scattering::GaussianPulse{12e-6, 2e-6}};
  scattering::UniformAxis R, xi;
  double t_cross{};

  Collision(std::size_t xi_points, std::size_t R_points) {
    auto spec = scattering::GridSpec::defaults_for(ic.envelope_width(), ic.center_of_mass());
    spec.xi_points = xi_points;
    spec.R_points = R_points;
    R = spec.R_axis();
    xi = spec.xi_axis();
    t_cross = 24e-6 / medium.v_gr;
  }
};

void BM_Characteristics(benchmark::State& state) {
  const Collision c(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        scattering::evolve_characteristics(c.ic, c.R, c.xi, c.medium, c.t_cross));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}
BENCHMARK(BM_Characteristics)->Arg(1024)->Arg(2048)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_FiniteDifference(benchmark::State& state) {
  const Collision c(static_cast<std::size_t>(state.range(0)), 8);
  const auto w0 = c.ic.sample(c.R, c.xi);
  const scattering::FdSettings s{0.9995 * c.xi.step() / (2.0 * c.medium.v_gr),
                                 3.0 * c.xi.step(), 0};
  for (auto _ : state) benchmark::DoNotOptimize(scattering::evolve_fd(w0, c.medium, c.t_cross, s));
}
BENCHMARK(BM_FiniteDifference)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_SiteRk4(benchmark::State& state) {
  const ExperimentConfig cfg = bench_config();
  const double omega = cfg.control_rabi_Omega0;
  const double field = 1e-3 * omega / site::probe_coupling(cfg);
  const site::DriveProfile pulse{site::GaussianDrive{field, 80.0 / omega, 10.0 / omega},
                                 site::GaussianDrive{field, 80.0 / omega, 10.0 / omega}};
  site::IntegrationSettings s;
  s.dt = 0.02 / omega;
  s.t_end = static_cast<double>(state.range(0)) * s.dt;
  for (auto _ : state) benchmark::DoNotOptimize(site::integrate_site(cfg, pulse, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SiteRk4)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
