#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"

#include "../oracles.hpp"
#include "aotuav/adam.hpp"
#include "aotuav/agent.hpp"
#include "aotuav/errors.hpp"
#include "aotuav/replay.hpp"

using namespace aot;

namespace {

QNet random_net(Eigen::Index in, Eigen::Index h, Eigen::Index hv, Eigen::Index ha, Eigen::Index actions,
                std::uint64_t seed) {
  QNet p(in, h, hv, ha, actions);
  Rng rng(seed);
  init_uniform_fan_in(p, rng);
  // Non-zero biases so every path carries signal.
  std::uniform_real_distribution<double> b(-0.3, 0.3);
  for (auto* m : {&p.shared_b, &p.value_hidden_b, &p.adv_hidden_b, &p.value_out_b, &p.adv_out_b}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) (*m)(i) = b(rng);
  }
  return p;
}

Transition make_transition(Eigen::Index dim, std::size_t actions, double tag) {
  Transition t;
  t.s = Eigen::VectorXd::Constant(dim, tag);
  t.a = 0;
  t.r = tag;
  t.s_next = Eigen::VectorXd::Constant(dim, tag + 0.5);
  t.mask_next = ActionMask(actions, true);
  return t;
}

}  // namespace

TEST_CASE("q_forward aggregation") {
  SUBCASE("all-zero parameters give zero Q") {
    const QNet p(4, 8, 8, 8, 3);
    const auto out = q_forward(p, Eigen::VectorXd::Ones(4));
    CHECK(out.q.isZero());
  }
  SUBCASE("constant advantage collapses Q onto V") {
    QNet p = random_net(4, 8, 8, 8, 3, 1);
    p.adv_out_w.setZero();
    p.adv_out_b.setConstant(2.5);
    const auto out = q_forward(p, Eigen::VectorXd::LinSpaced(4, -1, 1));
    for (Eigen::Index a = 0; a < 3; ++a) CHECK(out.q(a) == doctest::Approx(out.value).epsilon(1e-14));
  }
  SUBCASE("mean of Q - V is zero") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> x(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const QNet p = random_net(10, 32, 16, 16, 8, 100 + static_cast<std::uint64_t>(k));
      Eigen::VectorXd obs(10);
      for (Eigen::Index i = 0; i < 10; ++i) obs(i) = x(rng);
      const auto out = q_forward(p, obs);
      CHECK(std::abs((out.q.array() - out.value).mean()) < 1e-6);
    }
  }
  SUBCASE("wrong observation length") {
    const QNet p(4, 8, 8, 8, 3);
    CHECK_THROWS_AS(q_forward(p, Eigen::VectorXd::Ones(5)), ShapeError);
  }
}

TEST_CASE("batched forward equals per-column forward") {
  const QNet p = random_net(6, 12, 10, 9, 4, 4);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(6, 5);
  const auto batch = forward_batch(p, obs);
  for (Eigen::Index b = 0; b < 5; ++b) {
    const Eigen::VectorXd single = q_forward(p, obs.col(b)).q;
    CHECK((batch.q.col(b) - single).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("loss_and_gradients") {
  const QNet p = random_net(4, 8, 8, 8, 3, 7);
  const Eigen::MatrixXd obs = Eigen::MatrixXd::Random(4, 3);
  const std::vector<std::size_t> actions{0, 2, 1};
  const auto q = forward_batch(p, obs).q;

  SUBCASE("targets at current Q give zero loss and zero gradients") {
    const std::vector<double> targets{q(0, 0), q(2, 1), q(1, 2)};
    const std::vector<double> w{1, 1, 1};
    const auto r = loss_and_gradients<double>(p, obs, actions, targets, w);
    CHECK(r.loss == doctest::Approx(0.0));
    for_each_block([](const auto& g) { CHECK(g.cwiseAbs().maxCoeff() == doctest::Approx(0.0)); }, r.grad);
  }
  SUBCASE("single transition with unit weight is the squared TD error") {
    const std::vector<std::size_t> a{1};
    const std::vector<double> target{q(1, 0) + 3.0};
    const std::vector<double> w{1.0};
    const auto r = loss_and_gradients<double>(p, obs.leftCols(1), a, target, w);
    CHECK(r.loss == doctest::Approx(9.0));
    CHECK(r.td_error(0) == doctest::Approx(3.0));
  }
  SUBCASE("finite-difference agreement on a tiny net") {
    const std::vector<double> targets{1.0, -0.5, 2.0};
    const std::vector<double> w{0.3, 1.0, 0.7};
    REQUIRE(oracle::min_relu_margin(p, obs) > 1e-3);
    const auto r = loss_and_gradients<double>(p, obs, actions, targets, w);
    CHECK(r.loss == doctest::Approx(oracle::reference_loss(p, obs, actions, targets, w)));
    CHECK(oracle::max_gradient_error(p, r.grad, obs, actions, targets, w) < 1e-4);
  }
  SUBCASE("shape errors") {
    const std::vector<double> t2{1.0, 2.0};
    const std::vector<double> w3{1, 1, 1};
    CHECK_THROWS_AS(loss_and_gradients<double>(p, obs, actions, t2, w3), ShapeError);
  }
}

TEST_CASE("templated core also runs in single precision") {
  DuelingParams<float> p(3, 4, 4, 4, 2);
  p.value_out_b(0, 0) = 1.5f;
  const auto out = q_forward(p, Eigen::VectorXf::Ones(3));
  CHECK(out.q(0) == 1.5f);
  CHECK(out.q(1) == 1.5f);
}

TEST_CASE("apply_adam") {
  const QNet start = random_net(3, 4, 4, 4, 2, 1);

  SUBCASE("zero gradient leaves parameters and decays moments") {
    QNet p = start;
    AdamState<double> adam(p);
    adam.first_moment.shared_w.setConstant(1.0);
    adam.second_moment.shared_w.setConstant(1.0);
    apply_adam(p, p.zeros_like(), adam, 0.1);
    CHECK(adam.step_count == 1);
    CHECK(adam.first_moment.shared_w(0, 0) == doctest::Approx(0.9));
    CHECK(adam.second_moment.shared_w(0, 0) == doctest::Approx(0.999));
    // The stale moment still moves parameters; with fresh moments nothing moves.
    QNet q = start;
    AdamState<double> fresh(q);
    apply_adam(q, q.zeros_like(), fresh, 0.1);
    CHECK(q == start);
  }
  SUBCASE("lr = 0 changes nothing") {
    QNet p = start;
    AdamState<double> adam(p);
    QNet g = p.zeros_like();
    g.shared_w.setConstant(3.0);
    apply_adam(p, g, adam, 0.0);
    CHECK(p == start);
  }
  SUBCASE("constant gradient settles to a step of lr against its sign") {
    QNet p = start;
    AdamState<double> adam(p);
    QNet g = p.zeros_like();
    g.shared_w.setConstant(-0.7);
    double before = p.shared_w(0, 0);
    double step = 0.0;
    for (int i = 0; i < 2000; ++i) {
      apply_adam(p, g, adam, 1e-3);
      step = p.shared_w(0, 0) - before;
      before = p.shared_w(0, 0);
    }
    CHECK(step == doctest::Approx(1e-3).epsilon(1e-6));
  }
}

TEST_CASE("soft_update") {
  const QNet online = random_net(3, 4, 4, 4, 2, 2);
  QNet target = random_net(3, 4, 4, 4, 2, 3);

  SUBCASE("tau = 1 copies") {
    soft_update(online, target, 1.0);
    CHECK(target == online);
  }
  SUBCASE("gap shrinks by 1 - tau per application") {
    auto gap = [&] { return (target.adv_out_w - online.adv_out_w).norm(); };
    for (int i = 0; i < 10; ++i) {
      const double g0 = gap();
      soft_update(online, target, 0.01);
      CHECK(gap() == doctest::Approx(0.99 * g0).epsilon(1e-10));
    }
  }
  SUBCASE("tau outside (0,1] is rejected") {
    CHECK_THROWS_AS(soft_update(online, target, 0.0), DomainError);
    CHECK_THROWS_AS(soft_update(online, target, 1.5), DomainError);
  }
}

TEST_CASE("masked_argmax and select_action") {
  Eigen::VectorXd q(4);
  q << 1.0, 5.0, 5.0, 2.0;
  CHECK(masked_argmax(q, {true, true, true, true}) == 1);
  CHECK(masked_argmax(q, {true, false, true, true}) == 2);
  CHECK(masked_argmax(q, {false, false, false, true}) == 3);
  CHECK_THROWS_AS(masked_argmax(q, {false, false, false, false}), ContractViolation);

  const QNet p = random_net(5, 8, 8, 8, 4, 11);
  const Eigen::VectorXd obs = Eigen::VectorXd::LinSpaced(5, 0, 1);
  Rng rng(1);
  const ActionMask all(4, true);
  const std::size_t greedy = masked_argmax(q_forward(p, obs).q, all);
  for (int i = 0; i < 50; ++i) CHECK(select_action(p, obs, all, 0.0, rng) == greedy);
  for (int i = 0; i < 50; ++i) CHECK(select_action(p, obs, {false, false, false, true}, 1.0, rng) == 3);
  CHECK_THROWS_AS(select_action(p, obs, ActionMask(4, false), 0.5, rng), ContractViolation);

  std::array<int, 4> counts{};
  const ActionMask three{true, false, true, true};
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) ++counts[select_action(p, obs, three, 1.0, rng)];
  CHECK(counts[1] == 0);
  for (std::size_t a : {0, 2, 3}) CHECK(std::abs(counts[a] / double(kDraws) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("td_targets") {
  const QNet online = random_net(3, 6, 6, 6, 3, 5);
  const QNet target = random_net(3, 6, 6, 6, 3, 6);
  Transition tr = make_transition(3, 3, 0.2);
  tr.r = 1.0;
  const Transition* batch[] = {&tr};

  SUBCASE("gamma = 0 returns the reward") { CHECK(td_targets(batch, online, target, 0.0)(0) == 1.0); }

  SUBCASE("target value at the online argmax") {
    QNet t = target;
    t.adv_out_w.setZero();
    t.adv_out_b.setZero();
    t.value_out_w.setZero();
    t.value_out_b(0, 0) = 4.0;
    CHECK(td_targets(batch, online, t, 0.5)(0) == doctest::Approx(3.0));
  }

  SUBCASE("online selects, target evaluates") {
    // Online prefers action 2, target prefers action 0.
    QNet on = online, tg = target;
    on.adv_out_w.setZero();
    on.adv_out_b << 0.0, 1.0, 9.0;
    tg.adv_out_w.setZero();
    tg.adv_out_b << 7.0, 0.0, -5.0;
    tg.value_out_w.setZero();
    tg.value_out_b(0, 0) = 0.0;
    const double mean_adv = (7.0 + 0.0 - 5.0) / 3.0;
    CHECK(td_targets(batch, on, tg, 1.0)(0) == doctest::Approx(1.0 + (-5.0 - mean_adv)));

    // With action 2 masked out at s', online's next pick (1) is used.
    tr.mask_next = {true, true, false};
    CHECK(td_targets(batch, on, tg, 1.0)(0) == doctest::Approx(1.0 + (0.0 - mean_adv)));
  }
}

TEST_CASE("linear_schedule") {
  CHECK(linear_schedule(1.0, 0.05, 0.0) == 1.0);
  CHECK(linear_schedule(1.0, 0.05, 1.0) == 0.05);
  CHECK(linear_schedule(1.0, 0.05, 2.0) == 0.05);
  CHECK(linear_schedule(0.6, 1.0, 0.5) == doctest::Approx(0.8));
}

TEST_CASE("sum tree") {
  SumTree t(5);
  t.set(0, 1.0);
  t.set(3, 3.0);
  CHECK(t.total() == 4.0);
  CHECK(t.max() == 3.0);
  CHECK(t.find(0.5) == 0);
  CHECK(t.find(1.5) == 3);
  CHECK(t.find(3.99) == 3);
  t.set(3, 0.5);
  CHECK(t.max() == 1.0);
  CHECK_THROWS_AS(t.set(5, 1.0), DomainError);
}

TEST_CASE("property: sum tree root equals the leaf sum after interleaved writes") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> v(1e-5, 50.0);
  SumTree t(4000);
  std::vector<double> leaves(4000, 0.0);
  std::uniform_int_distribution<std::size_t> idx(0, 3999);
  for (int op = 0; op < 1'000'000; ++op) {
    const std::size_t i = idx(rng);
    leaves[i] = v(rng);
    t.set(i, leaves[i]);
  }
  double sum = 0.0;
  for (double l : leaves) sum += l;
  CHECK(std::abs(t.total() - sum) / sum < 1e-6);
  CHECK(t.max_inconsistency() < 1e-12);
}

TEST_CASE("replay insertion priority and ring overwrite") {
  ReplayBuffer buf(4000, 0.2, 1e-5);
  buf.insert(make_transition(2, 2, 0));
  CHECK(buf.priority(0) == 1.0);
  const std::size_t idx[] = {0};
  const double err[] = {4.0};
  buf.update_priorities(idx, err);
  buf.insert(make_transition(2, 2, 1));
  CHECK(buf.priority(1) == doctest::Approx(4.0 + 1e-5));

  for (int k = 2; k <= 4000; ++k) buf.insert(make_transition(2, 2, k));
  CHECK(buf.size() == 4000);
  CHECK(buf.at(0).r == 4000.0);  // slot of the first transition now holds the 4001st
  CHECK(buf.at(1).r == 1.0);

  const double zero[] = {0.0};
  buf.update_priorities(idx, zero);
  CHECK(buf.priority(0) == 1e-5);
}

TEST_CASE("replay sampling probabilities and weights") {
  Rng rng(3);
  SUBCASE("alpha = 0 is uniform") {
    ReplayBuffer buf(8, 0.0, 1e-5);
    for (int k = 0; k < 8; ++k) buf.insert(make_transition(2, 2, k));
    const std::size_t idx[] = {0, 5};
    const double err[] = {10.0, 0.1};
    buf.update_priorities(idx, err);
    for (std::size_t i = 0; i < 8; ++i) CHECK(buf.probability(i) == doctest::Approx(1.0 / 8));
  }
  SUBCASE("priorities (1, 3) with alpha = 1") {
    ReplayBuffer buf(2, 1.0, 1e-5);
    buf.insert(make_transition(2, 2, 0));
    buf.insert(make_transition(2, 2, 1));
    const std::size_t idx[] = {0, 1};
    const double err[] = {1.0 - 1e-5, 3.0 - 1e-5};
    buf.update_priorities(idx, err);
    CHECK(buf.probability(0) == doctest::Approx(0.25));
    CHECK(buf.probability(1) == doctest::Approx(0.75));
  }
  SUBCASE("uniform priorities give unit weights for any beta") {
    ReplayBuffer buf(64, 0.2, 1e-5);
    for (int k = 0; k < 64; ++k) buf.insert(make_transition(2, 2, k));
    for (double beta : {0.0, 0.6, 1.0}) {
      const auto s = buf.sample(32, beta, rng);
      REQUIRE(s);
      for (double w : s->weights) CHECK(w == 1.0);
    }
  }
  SUBCASE("weights lie in (0, 1]") {
    ReplayBuffer buf(100, 0.6, 1e-5);
    std::mt19937_64 g(1);
    std::exponential_distribution<double> e(1.0);
    for (int k = 0; k < 100; ++k) buf.insert(make_transition(2, 2, k));
    for (std::size_t i = 0; i < 100; ++i) {
      const std::size_t idx[] = {i};
      const double err[] = {e(g)};
      buf.update_priorities(idx, err);
    }
    for (int rep = 0; rep < 100; ++rep) {
      const auto s = buf.sample(32, 0.7, rng);
      for (double w : s->weights) {
        CHECK(w > 0.0);
        CHECK(w <= 1.0);
      }
    }
  }
  SUBCASE("underfilled buffer is not ready") {
    ReplayBuffer buf(64, 0.2, 1e-5);
    for (int k = 0; k < 31; ++k) buf.insert(make_transition(2, 2, k));
    CHECK_FALSE(buf.sample(32, 1.0, rng).has_value());
  }
}

TEST_CASE("agent train_step thresholds and target blending") {
  AgentHyper h;
  h.hidden = h.value_hidden = h.advantage_hidden = 8;
  Agent agent(h, 4, 3, 1);
  for (int k = 0; k < 319; ++k) agent.remember(make_transition(4, 3, k * 0.01));
  CHECK_FALSE(agent.train_step(0.6).has_value());
  agent.remember(make_transition(4, 3, 3.2));
  QNet target_before = agent.target();
  for (int step = 1; step <= 400; ++step) {
    const auto stats = agent.train_step(0.6);
    REQUIRE(stats.has_value());
    CHECK(stats->synced_target == (step % 200 == 0));
    if (step == 199) CHECK(agent.target() == target_before);
    if (step == 200) CHECK_FALSE(agent.target() == target_before);
  }
  CHECK(agent.train_steps() == 400);
}

TEST_CASE("checkpoint round trip and corruption") {
  AgentHyper h;
  h.hidden = h.value_hidden = h.advantage_hidden = 8;
  h.train_start = 32;
  Agent agent(h, 4, 3, 5);
  for (int k = 0; k < 64; ++k) agent.remember(make_transition(4, 3, k * 0.1));
  for (int s = 0; s < 10; ++s) agent.train_step(0.8);

  const auto path = std::filesystem::temp_directory_path() / "aotuav_ckpt_test.bin";
  agent.save(path);
  const Agent loaded = Agent::load(path, h);
  CHECK(loaded.same_learned_state(agent));

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    const char junk = 0x5a;
    f.write(&junk, 1);
  }
  CHECK_THROWS_AS(Agent::load(path, h), FormatError);
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTACKPT";
  }
  CHECK_THROWS_AS(Agent::load(path, h), FormatError);
  std::filesystem::remove(path);
}
