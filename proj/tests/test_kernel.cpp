#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <random>

#include "elbm/boundary.hpp"
#include "elbm/kernel.hpp"
#include "elbm/solver.hpp"
#include "elbm/stabmon.hpp"
#include "elbm/verify.hpp"
#include "test_oracles.hpp"

using namespace elbm;

namespace {

std::vector<double> random_populations(std::size_t nodes, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> f(nodes * kStatePerNode);
  for (double& v : f) v = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("moments of trivial population sets") {
  const State zero = moments_at(std::vector<double>(20, 0.0).data(), State{}, 0.01);
  for (std::size_t k = 0; k < 5; ++k) REQUIRE(zero[k] == 0.0);

  // partition of unity: four equal quarters sum to the state itself
  State w{{0.3, -0.2, 1.5, 0.0, 2.0}};
  std::vector<double> f(20);
  for (std::size_t q = 0; q < 4; ++q)
    for (std::size_t k = 0; k < 5; ++k) f[q * 5 + k] = 0.25 * w[k];
  const State u = moments_at(f.data(), State{}, 0.01);
  for (std::size_t k = 0; k < 5; ++k) REQUIRE(u[k] == Catch::Approx(w[k]).margin(1e-16));
}

TEST_CASE("moments equal the brute-force summation oracle bitwise") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double f[20];
    for (double& v : f) v = dist(rng);
    State body;
    for (std::size_t k = 0; k < 5; ++k) body[k] = dist(rng);
    const double dt = 0.004;
    const State u = moments_at(f, body, dt);
    for (std::size_t k = 0; k < 5; ++k) {
      const double expect = ((f[k] + f[5 + k]) + f[10 + k]) + f[15 + k] + 0.5 * dt * body[k];
      REQUIRE(u[k] == expect);  // 0 ulp
    }
  }
}

TEST_CASE("equilibrium of the zero state is zero") {
  const Material m(1.1, 0.4);
  const State f = equilibrium(m, State{}, 1, 0, 2.5);
  for (std::size_t k = 0; k < 5; ++k) REQUIRE(f[k] == 0.0);
}

TEST_CASE("equilibrium closed form for a pure dilatational material") {
  const Material m(1.0, 0.0);
  State u;
  u[0] = 1.0;
  const State f = equilibrium(m, u, 1, 0, 2.0);
  const State expect{{0.25, 0.0, 0.25, 0.0, 0.0}};  // 1/4 (1,0,1,0,0)
  for (std::size_t k = 0; k < 5; ++k) REQUIRE(f[k] == Catch::Approx(expect[k]).margin(1e-16));
}

TEST_CASE("equilibrium moment identities") {
  // all four conditions: sum f_eq = U, sum c i f_eq = flux_x, sum c j f_eq =
  // flux_y, sum c^2 (i^2 - j^2) f_eq = 0
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_real_distribution<double> mdist(0.0, 2.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const Material m(mdist(rng) + 1e-6, mdist(rng));
    const double margin = 0.3 + 0.69 * (trial % 100) / 100.0;
    const double c = 2.0 * std::sqrt(m.cK2 + m.cmu2) / margin;
    State u;
    for (std::size_t k = 0; k < 5; ++k) u[k] = dist(rng);

    State sum{}, mom_x{}, mom_y{}, mom_d{};
    for (std::size_t q = 0; q < kNumLinks; ++q) {
      const int i = VelocitySet::ci[q], j = VelocitySet::cj[q];
      const State f = equilibrium(m, u, i, j, c);
      for (std::size_t k = 0; k < 5; ++k) {
        sum[k] += f[k];
        mom_x[k] += c * i * f[k];
        mom_y[k] += c * j * f[k];
        mom_d[k] += c * c * (i * i - j * j) * f[k];
      }
    }
    const State fx = flux_x(m, u), fy = flux_y(m, u);
    for (std::size_t k = 0; k < 5; ++k) {
      REQUIRE(sum[k] == Catch::Approx(u[k]).margin(1e-13));
      REQUIRE(mom_x[k] == Catch::Approx(fx[k]).margin(1e-13));
      REQUIRE(mom_y[k] == Catch::Approx(fy[k]).margin(1e-13));
      REQUIRE(mom_d[k] == Catch::Approx(0.0).margin(1e-13));
    }
  }
}

TEST_CASE("collision fixed points") {
  const Material m(1.1, 0.4);
  const double c = 2.5;
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  State u;
  for (std::size_t k = 0; k < 5; ++k) u[k] = dist(rng);

  SECTION("equilibrium is a fixed point at omega = 2") {
    double f[20];
    for (std::size_t q = 0; q < 4; ++q) {
      const State feq = equilibrium(m, u, VelocitySet::ci[q], VelocitySet::cj[q], c);
      for (std::size_t k = 0; k < 5; ++k) f[q * 5 + k] = feq[k];
    }
    double fstar[20];
    std::copy(f, f + 20, fstar);
    collide_node(m, c, 2.0, u, fstar);
    for (std::size_t i = 0; i < 20; ++i) REQUIRE(fstar[i] == f[i]);
  }

  SECTION("omega = 1 relaxes fully to equilibrium") {
    double f[20];
    for (double& v : f) v = dist(rng);
    collide_node(m, c, 1.0, u, f);
    for (std::size_t q = 0; q < 4; ++q) {
      const State feq = equilibrium(m, u, VelocitySet::ci[q], VelocitySet::cj[q], c);
      for (std::size_t k = 0; k < 5; ++k)
        REQUIRE(f[q * 5 + k] == Catch::Approx(feq[k]).margin(1e-16));
    }
  }

  SECTION("omega = 2 is f* = 2 f_eq - f and conserves the zeroth moment") {
    double f[20];
    for (double& v : f) v = dist(rng);
    const State u_pre = moments_at(f, State{}, 0.0);
    double fstar[20];
    std::copy(f, f + 20, fstar);
    collide_node(m, c, 2.0, u_pre, fstar);
    for (std::size_t q = 0; q < 4; ++q) {
      const State feq = equilibrium(m, u_pre, VelocitySet::ci[q], VelocitySet::cj[q], c);
      for (std::size_t k = 0; k < 5; ++k)
        REQUIRE(fstar[q * 5 + k] == 2.0 * feq[k] - f[q * 5 + k]);
    }
    const State u_post = moments_at(fstar, State{}, 0.0);
    for (std::size_t k = 0; k < 5; ++k)
      REQUIRE(u_post[k] == Catch::Approx(u_pre[k]).margin(1e-14));
  }
}

TEST_CASE("solver rejects out-of-range omega") {
  const Lattice lat = build_lattice({1.0, 1.0}, 0.25, 0.1, BcMode::periodic, 1.0);
  WorkerPool pool(1);
  REQUIRE_THROWS(Solver(lat, Material(1.0, 0.5), 0.0, pool));
  REQUIRE_THROWS(Solver(lat, Material(1.0, 0.5), 2.5, pool));
  Solver warn(lat, Material(1.0, 0.5), 1.5, pool);
  REQUIRE(warn.first_order_only());
  Solver ok(lat, Material(1.0, 0.5), 2.0, pool);
  REQUIRE_FALSE(ok.first_order_only());
}

TEST_CASE("solver carries the CFL gate state") {
  const Lattice lat = build_lattice({1.0, 1.0}, 1.0 / 4.0, 1.0 / 10.0,
                                    BcMode::periodic, 1.0);  // c = 2.5
  WorkerPool pool(1);
  REQUIRE(Solver(lat, Material(1.1, 0.4), 2.0, pool).cfl_ok());
  REQUIRE_FALSE(Solver(lat, Material(1.2, 0.4), 2.0, pool).cfl_ok());
}

TEST_CASE("pure streaming on a periodic lattice") {
  const Lattice lat = build_lattice({1.0, 1.0}, 0.25, 0.1, BcMode::periodic, 1.0);
  WorkerPool pool(1);
  PopulationField f(lat.num_nodes());

  SECTION("a single population returns home after nx steps") {
    f.current()[PopulationField::slot(lat.node_index(1, 2), 0)] = 1.0;
    for (int s = 0; s < 4; ++s) {
      std::fill_n(f.next(), lat.num_nodes() * kStatePerNode, 0.0);
      stream_interior(lat, f.current(), f.next(), pool);
      apply_periodic(lat, f.current(), f.next());
      f.swap_buffers();
    }
    REQUIRE(f.current()[PopulationField::slot(lat.node_index(1, 2), 0)] == 1.0);
    double total = 0.0;
    for (std::size_t i = 0; i < lat.num_nodes() * kStatePerNode; ++i)
      total += std::abs(f.current()[i]);
    REQUIRE(total == 1.0);
  }

  SECTION("uniform fields are translation invariant") {
    for (std::size_t i = 0; i < lat.num_nodes() * kStatePerNode; ++i)
      f.current()[i] = 0.5 + static_cast<double>(i % kStatePerNode);
    stream_interior(lat, f.current(), f.next(), pool);
    apply_periodic(lat, f.current(), f.next());
    f.swap_buffers();
    for (std::size_t i = 0; i < lat.num_nodes() * kStatePerNode; ++i)
      REQUIRE(f.current()[i] == 0.5 + static_cast<double>(i % kStatePerNode));
  }

  SECTION("streaming permutes the stored values") {
    const std::vector<double> before = random_populations(lat.num_nodes(), 5);
    std::copy(before.begin(), before.end(), f.current());
    stream_interior(lat, f.current(), f.next(), pool);
    apply_periodic(lat, f.current(), f.next());
    f.swap_buffers();
    std::vector<double> after(f.current(), f.current() + before.size());
    std::vector<double> a = before, b = after;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
  }
}

TEST_CASE("zero state stays zero under stepping") {
  const Lattice lat = build_lattice({1.0, 1.0}, 0.25, 0.1, BcMode::periodic, 1.0);
  WorkerPool pool(1);
  Solver s(lat, Material(1.1, 0.4), 2.0, pool);
  s.set_populations(std::vector<double>(lat.num_nodes() * kStatePerNode, 0.0));
  for (int i = 0; i < 3; ++i) s.step();
  for (std::size_t i = 0; i < lat.num_nodes() * kStatePerNode; ++i)
    REQUIRE(s.populations().current()[i] == 0.0);
  for (std::size_t n = 0; n < lat.num_nodes(); ++n) {
    REQUIRE(s.displacement()[n].x == 0.0);
    REQUIRE(s.state()[n].finite());
  }
}

TEST_CASE("one step matches the naive reference kernel to 0 ulp") {
  const std::size_t nx = 3, ny = 3;
  const double dx = 1.0 / 3.0, dt = 2.0 / 15.0;  // c = 2.5
  const Material m(1.1, 0.4);
  const Lattice lat = build_lattice({1.0, 1.0}, dx, dt, BcMode::periodic, 1.0);
  WorkerPool pool(1);

  // shared synthetic body load so the (dt/2) B path is exercised
  auto body_at = [](std::size_t node, double t) {
    return Vec2{0.3 * static_cast<double>(node) - t, 0.1 * static_cast<double>(node) + 2.0 * t};
  };
  Solver s(lat, m, 2.0, pool,
           [&](double t, std::span<Vec2> out) {
             for (std::size_t n = 0; n < out.size(); ++n) out[n] = body_at(n, t);
           });
  const std::vector<double> init = random_populations(nx * ny, 2024);
  s.set_populations(init);

  oracle::ReferenceGrid ref(nx, ny, dx, dt, m, 2.0);
  ref.body = body_at;
  for (std::size_t n = 0; n < nx * ny; ++n)
    for (std::size_t q = 0; q < 4; ++q)
      for (std::size_t k = 0; k < 5; ++k)
        ref.f[n][q][k] = init[PopulationField::slot(n, q) + k];
  ref.compute_moments(0.0);

  for (int stepi = 0; stepi < 3; ++stepi) {
    s.step();
    ref.step(static_cast<double>(stepi) * dt);
    for (std::size_t n = 0; n < nx * ny; ++n) {
      for (std::size_t q = 0; q < 4; ++q)
        for (std::size_t k = 0; k < 5; ++k)
          REQUIRE(s.populations().current()[PopulationField::slot(n, q) + k] ==
                  ref.f[n][q][k]);
      for (std::size_t k = 0; k < 5; ++k) REQUIRE(s.state()[n][k] == ref.U[n][k]);
      REQUIRE(s.displacement()[n].x == ref.u_num[n][0]);
      REQUIRE(s.displacement()[n].y == ref.u_num[n][1]);
    }
  }
}

TEST_CASE("periodic norm conservation over one thousand steps") {
  // omega = 2, no forcing: the weighted norm is conserved
  const Material m(1.1, 0.4);
  const Lattice lat = build_lattice({1.0, 1.0}, 1.0 / 20.0, 1.0 / 50.0,
                                    BcMode::periodic, 100.0);
  WorkerPool pool(2);
  const ManufacturedCase c = case_stability_ic();
  Solver s(lat, m, 2.0, pool);
  s.initialize(case_init_data(c, m));
  const Symmetrizer sym(m, lat.disc().c);
  const double n0 = weighted_norm(sym, s.populations(), pool);
  REQUIRE(n0 > 0.0);
  double max_drift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    s.step();
    const double n = weighted_norm(sym, s.populations(), pool);
    max_drift = std::max(max_drift, std::abs(n - n0) / n0);
  }
  REQUIRE(max_drift <= 1e-12);
}

TEST_CASE("homogeneous dirichlet norm conservation after one step") {
  const Material m(1.1, 0.4);
  const Lattice lat = build_lattice({1.0, 1.0}, 1.0 / 16.0, 1.0 / 40.0,
                                    BcMode::dirichlet, 1.0);
  WorkerPool pool(1);
  const ManufacturedCase c = case_stability_ic();
  Solver s(lat, m, 2.0, pool);
  s.initialize(case_init_data(c, m));
  const Symmetrizer sym(m, lat.disc().c);
  const double n0 = weighted_norm(sym, s.populations(), pool);
  s.step();
  const double n1 = weighted_norm(sym, s.populations(), pool);
  REQUIRE(std::abs(n1 - n0) / n0 <= 1e-14);
}

TEST_CASE("step results are bitwise independent of the worker count") {
  const Material m(0.75, 0.75);
  const ManufacturedCase c = case_wave52();
  std::vector<std::vector<double>> finals;
  for (std::size_t workers : {std::size_t{1}, std::size_t{4}}) {
    const Lattice lat = build_lattice({1.0, 1.0}, 1.0 / 20.0, 1.0 / 50.0,
                                      BcMode::periodic, 1.0);
    WorkerPool pool(workers);
    Solver s(lat, m, 2.0, pool, case_body_slice(c, lat, m), case_wall_velocity(c));
    s.initialize(case_init_data(c, m));
    for (int i = 0; i < 25; ++i) s.step();
    finals.emplace_back(s.populations().current(),
                        s.populations().current() + lat.num_nodes() * kStatePerNode);
  }
  REQUIRE(finals[0] == finals[1]);
}
