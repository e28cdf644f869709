#include <doctest.h>

#include <cmath>
#include <vector>

#include "adaptnet/egt_combiners.hpp"
#include "adaptnet/errors.hpp"
#include "adaptnet/rng.hpp"

using namespace adaptnet;

namespace {

std::vector<NodeProfile> flat_profiles(int n, double sigma2 = 1.0) {
  std::vector<NodeProfile> p(n);
  for (auto& q : p) {
    q.noise_variance = sigma2;
    q.regressor_spectrum = {1.0};
  }
  return p;
}

std::vector<int> closed(const Topology& t, int i) {
  std::vector<int> nodes{i};
  const auto nb = t.neighbors(i);
  nodes.insert(nodes.end(), nb.begin(), nb.end());
  return nodes;
}

}  // namespace

TEST_CASE("fitness mixes baseline and utility by selection intensity") {
  CHECK(egt::Fitness{1.0, 0.0, 99.0}.value() == doctest::Approx(1.0));
  CHECK(egt::Fitness{1.0, 1.0, 99.0}.value() == doctest::Approx(99.0));
  CHECK(egt::Fitness{2.0, 0.25, 10.0}.value() == doctest::Approx(4.0));
}

TEST_CASE("table fitness definitions") {
  // hub graph: n_max = 6, node 1 has |N_1| = 3
  const Topology hub = Topology::from_edges(
      6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}});
  const auto profiles = flat_profiles(6);

  CHECK(egt::fitness_table2(egt::FitnessRule::uniform, hub, profiles, 1, 0) ==
        1.0);
  CHECK(egt::fitness_table2(egt::FitnessRule::laplacian, hub, profiles, 1, 1) ==
        doctest::Approx(4.0));  // n_max - n_i + 1 = 6 - 3 + 1
  CHECK(egt::fitness_table2(egt::FitnessRule::laplacian, hub, profiles, 1, 0) ==
        1.0);
  CHECK(egt::fitness_table2(egt::FitnessRule::max_degree, hub, profiles, 1, 1) ==
        doctest::Approx(6.0 - 3.0 + 1.0));

  // n_j = 4, sigma_j^2 = 0.5 -> 8
  const Topology star = Topology::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
  auto varied = flat_profiles(4);
  varied[0].noise_variance = 0.5;
  CHECK(egt::fitness_table2(egt::FitnessRule::rel_degree_var, star, varied, 1,
                            0) == doctest::Approx(8.0));
  CHECK(egt::fitness_table2(egt::FitnessRule::rel_degree, star, varied, 1, 0) ==
        doctest::Approx(4.0));

  CHECK_THROWS(egt::fitness_rule_from_name("metropolis"));
  CHECK_THROWS(egt::fitness_rule_from_name("hastings"));
}

TEST_CASE("IM weights") {
  SUBCASE("equal fitness gives the uniform rule") {
    const auto row = egt::im_weights({0, 1, 2}, std::vector<double>{2.0, 2.0, 2.0});
    for (const double w : row.weights) CHECK(w == doctest::Approx(1.0 / 3));
  }
  SUBCASE("normalization") {
    const auto row = egt::im_weights({0, 1}, std::vector<double>{1.0, 3.0});
    CHECK(row.weights[0] == doctest::Approx(0.25));
    CHECK(row.weights[1] == doctest::Approx(0.75));
  }
  SUBCASE("single member") {
    const auto row = egt::im_weights({4}, std::vector<double>{0.3});
    CHECK(row.weights[0] == doctest::Approx(1.0));
  }
  SUBCASE("scale invariance") {
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> f(4);
      for (double& x : f) x = 0.1 + rng.uniform();
      const double c = 0.01 + 100.0 * rng.uniform();
      std::vector<double> g(f);
      for (double& x : g) x *= c;
      const auto a = egt::im_weights({0, 1, 2, 3}, f);
      const auto b = egt::im_weights({0, 1, 2, 3}, g);
      for (std::size_t k = 0; k < 4; ++k)
        CHECK(a.weights[k] == doctest::Approx(b.weights[k]).epsilon(1e-12));
    }
  }
  SUBCASE("nonpositive fitness is rejected") {
    CHECK_THROWS_AS(egt::im_weights({0, 1}, std::vector<double>{1.0, 0.0}),
                    CombinerError);
    CHECK_THROWS_AS(egt::im_weights({0, 1}, std::vector<double>{1.0, -2.0}),
                    CombinerError);
  }
}

TEST_CASE("BD weights") {
  SUBCASE("two-node complete graph with equal fitness") {
    const Topology pair = Topology::from_edges(2, {{0, 1}});
    const std::vector<double> f{1.0, 1.0};
    const auto row = egt::bd_weights(f, pair, 0);
    REQUIRE(row.nodes[0] == 0);
    CHECK(row.weights[1] == doctest::Approx(0.25));  // (1/2) * (1/2)
    CHECK(row.weights[0] == doctest::Approx(0.75));
  }
  SUBCASE("single node keeps everything") {
    const Topology solo = Topology::from_edges(1, {});
    const auto row = egt::bd_weights(std::vector<double>{1.0}, solo, 0);
    CHECK(row.weights[0] == doctest::Approx(1.0));
  }
  SUBCASE("equal fitness on a regular graph gives identical rows") {
    const Topology reg = regular_circulant(10, {1, 2});
    const std::vector<double> f(10, 3.0);
    const auto ref = egt::bd_weights(f, reg, 0);
    for (int i = 1; i < 10; ++i) {
      const auto row = egt::bd_weights(f, reg, i);
      CHECK(row.weights == ref.weights);
    }
  }
}

TEST_CASE("DB weights") {
  SUBCASE("equal fitness, |N_i| = 3") {
    const Topology path = Topology::from_edges(3, {{0, 1}, {1, 2}});
    const auto nodes = closed(path, 1);
    const std::vector<double> f(3, 1.0);
    const auto row = egt::db_weights(nodes, f, path, 1);
    CHECK(row.weights[1] == doctest::Approx(1.0 / 9));
    CHECK(row.weights[2] == doctest::Approx(1.0 / 9));
    CHECK(row.weights[0] == doctest::Approx(7.0 / 9));
  }
  SUBCASE("isolated self keeps everything") {
    const Topology solo = Topology::from_edges(1, {});
    const auto row =
        egt::db_weights({0}, std::vector<double>{2.0}, solo, 0);
    CHECK(row.weights[0] == doctest::Approx(1.0));
  }
  SUBCASE("rows sum to one on random instances") {
    Rng rng(21);
    const auto geo = random_geometric(12, 0.6, 5);
    for (int i = 0; i < 12; ++i) {
      const auto nodes = closed(geo.topology, i);
      std::vector<double> f(nodes.size());
      for (double& x : f) x = 0.1 + rng.uniform();
      const auto row = egt::db_weights(nodes, f, geo.topology, i);
      double s = 0.0;
      for (const double w : row.weights) s += w;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK_NOTHROW(validate_row(row, geo.topology, i));
    }
  }
}

TEST_CASE("error tracker recursion") {
  SUBCASE("nu = 1 keeps no memory") {
    egt::ErrorTracker t{5.0, 1.0};
    DataSample s{{1.0}, 3.0};
    t.update(std::vector<double>{1.0}, s);  // rho = (3 - 1)^2 = 4
    CHECK(t.beta == doctest::Approx(4.0));
  }
  SUBCASE("zero errors decay beta geometrically") {
    egt::ErrorTracker t{1.0, 0.25};
    DataSample s{{1.0}, 0.5};
    for (int k = 1; k <= 5; ++k) {
      t.update(std::vector<double>{0.5}, s);  // rho = 0
      CHECK(t.beta == doctest::Approx(std::pow(0.75, k)));
    }
  }
  SUBCASE("hand evaluation") {
    egt::ErrorTracker t{1.0, 0.1};
    DataSample s{{1.0}, std::sqrt(2.0)};
    t.update(std::vector<double>{0.0}, s);  // rho = 2
    CHECK(t.beta == doctest::Approx(1.1));
  }
  SUBCASE("forgetting factor bounds") {
    egt::ErrorTracker t{1.0, 0.0};
    DataSample s{{1.0}, 1.0};
    CHECK_THROWS(t.update(std::vector<double>{0.0}, s));
  }
}

TEST_CASE("error-aware fitness forms") {
  SUBCASE("lambda -> 0 flattens both forms") {
    const std::vector<double> betas{0.5, 2.0, 7.0};
    for (const auto form :
         {egt::ErrorFitnessForm::power, egt::ErrorFitnessForm::exponential}) {
      const auto f = egt::error_aware_fitness(betas, form, 1e-12);
      for (const double x : f) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("power form, lambda = 2") {
    const auto f = egt::error_aware_fitness(std::vector<double>{1.0, 2.0},
                                            egt::ErrorFitnessForm::power, 2.0);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(0.25));
    const auto row = egt::im_weights({0, 1}, f);
    CHECK(row.weights[0] == doctest::Approx(0.8));
    CHECK(row.weights[1] == doctest::Approx(0.2));
  }
  SUBCASE("exponential form, lambda = 1") {
    const auto f = egt::error_aware_fitness(
        std::vector<double>{0.0, std::log(4.0)},
        egt::ErrorFitnessForm::exponential, 1.0);
    CHECK(f[0] == doctest::Approx(1.0));
    CHECK(f[1] == doctest::Approx(0.25));
    const auto row = egt::im_weights({0, 1}, f);
    CHECK(row.weights[0] == doctest::Approx(0.8));
    CHECK(row.weights[1] == doctest::Approx(0.2));
  }
  SUBCASE("power form rejects beta = 0 unless floored") {
    CHECK_THROWS_AS(egt::error_aware_fitness(std::vector<double>{0.0},
                                             egt::ErrorFitnessForm::power, 2.0),
                    CombinerError);
    const auto f = egt::error_aware_fitness(
        std::vector<double>{0.0}, egt::ErrorFitnessForm::power, 2.0, 1e-12);
    CHECK(f[0] == doctest::Approx(1e24));
  }
  SUBCASE("weights fall strictly with own beta") {
    std::vector<double> betas{1.0, 1.0, 1.0};
    for (const auto form :
         {egt::ErrorFitnessForm::power, egt::ErrorFitnessForm::exponential}) {
      double prev = 1.0;
      for (double own = 1.0; own < 3.0; own += 0.25) {
        betas[0] = own;
        const auto row =
            egt::im_weights({0, 1, 2}, egt::error_aware_fitness(betas, form, 1.5));
        CHECK(row.weights[0] < prev);
        prev = row.weights[0];
      }
    }
  }
  SUBCASE("neighbor permutation permutes the weights") {
    const std::vector<double> betas{0.4, 1.1, 2.7};
    const std::vector<double> perm{1.1, 2.7, 0.4};
    const auto a = egt::im_weights(
        {0, 1, 2},
        egt::error_aware_fitness(betas, egt::ErrorFitnessForm::power, 2.0));
    const auto b = egt::im_weights(
        {1, 2, 0},
        egt::error_aware_fitness(perm, egt::ErrorFitnessForm::power, 2.0));
    CHECK(a.weights[0] == doctest::Approx(b.weights[2]));
    CHECK(a.weights[1] == doctest::Approx(b.weights[0]));
    CHECK(a.weights[2] == doctest::Approx(b.weights[1]));
  }
}

TEST_CASE("Wright-Fisher update") {
  SUBCASE("uniform utility keeps the shares") {
    const std::vector<std::vector<double>> u{{1.0, 1.0}, {1.0, 1.0}};
    const auto p = egt::wright_fisher_step(std::vector<double>{0.3, 0.7}, u);
    CHECK(p[0] == doctest::Approx(0.3));
    CHECK(p[1] == doctest::Approx(0.7));
  }
  SUBCASE("vertices are absorbing") {
    const std::vector<std::vector<double>> u{{1.0, 2.0}, {3.0, 4.0}};
    const auto p = egt::wright_fisher_step(std::vector<double>{1.0, 0.0}, u);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));
  }
  SUBCASE("hand evaluation") {
    const std::vector<std::vector<double>> u{{1.0, 1.0}, {2.0, 2.0}};
    const auto p = egt::wright_fisher_step(std::vector<double>{0.5, 0.5}, u);
    CHECK(p[0] == doctest::Approx(1.0 / 3));
    CHECK(p[1] == doctest::Approx(2.0 / 3));
  }
  SUBCASE("nonpositive average fitness is an error") {
    const std::vector<std::vector<double>> u{{0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(
        egt::wright_fisher_step(std::vector<double>{0.5, 0.5}, u),
        std::domain_error);
  }
}

TEST_CASE("utility-matrix route reproduces Metropolis and Hastings rows") {
  Rng rng(60);
  for (int trial = 0; trial < 10; ++trial) {
    const auto geo = random_geometric(10, 0.55, 400 + trial);
    std::vector<NodeProfile> profiles(10);
    for (auto& p : profiles) {
      p.noise_variance = 0.6 + 0.8 * rng.uniform();
      p.regressor_spectrum = {1.0};
    }
    for (int i = 0; i < 10; ++i) {
      const auto via_utility = egt::metropolis_row_via_utility(geo.topology, i);
      const auto direct = rules::metropolis(geo.topology, i);
      REQUIRE(via_utility.nodes == direct.nodes);
      for (std::size_t k = 0; k < direct.weights.size(); ++k)
        CHECK(via_utility.weights[k] ==
              doctest::Approx(direct.weights[k]).epsilon(1e-15));

      bool direct_threw = false, utility_threw = false;
      WeightRow h_direct, h_utility;
      try {
        h_direct = rules::hastings(geo.topology, profiles, i);
      } catch (const CombinerError&) {
        direct_threw = true;
      }
      try {
        h_utility = egt::hastings_row_via_utility(geo.topology, profiles, i);
      } catch (const CombinerError&) {
        utility_threw = true;
      }
      REQUIRE(direct_threw == utility_threw);
      if (!direct_threw)
        for (std::size_t k = 0; k < h_direct.weights.size(); ++k)
          CHECK(h_utility.weights[k] ==
                doctest::Approx(h_direct.weights[k]).epsilon(1e-15));
    }
  }
}
