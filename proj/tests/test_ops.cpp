#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <doctest.h>

#include "floodtext/adam.hpp"
#include "floodtext/error.hpp"
#include "floodtext/grad_check.hpp"
#include "floodtext/ops.hpp"
#include "floodtext/rng.hpp"
#include "floodtext/tensor.hpp"

using namespace floodtext;
using nn::DropoutKind;

namespace {

TensorD random_tensor(std::vector<std::size_t> shape, RngStream& rng,
                      double lo = -1.0, double hi = 1.0) {
  TensorD t(std::move(shape));
  for (auto& v : t.values) v = rng.uniform(lo, hi);
  return t;
}

// Fixed random coefficients turn a tensor-valued op into the scalar
// grad_check needs: loss = sum_i r_i * y_i, so dloss/dy = r.
TensorD coefficients(const TensorD& like, RngStream& rng) {
  TensorD r(like.shape);
  for (auto& v : r.values) v = rng.uniform(-1.0, 1.0);
  return r;
}

double weighted_sum(const TensorD& y, const TensorD& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.numel(); ++i) s += y.values[i] * r.values[i];
  return s;
}

}  // namespace

TEST_CASE("affine pinned cases") {
  TensorD x({1, 2}, {1.0, 2.0});
  TensorD eye({2, 2}, {1.0, 0.0, 0.0, 1.0});
  TensorD zero_b({2}, {0.0, 0.0});
  TensorD y = nn::affine(x, eye, zero_b);
  CHECK(y.values == std::vector<double>{1.0, 2.0});

  TensorD zeros({2, 2}, {0.0, 0.0, 0.0, 0.0});
  TensorD b({2}, {3.0, 4.0});
  y = nn::affine(x, zeros, b);
  CHECK(y.values == std::vector<double>{3.0, 4.0});
}

TEST_CASE("affine matches a naive triple-loop oracle") {
  RngStream rng(3, 1);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD x = random_tensor({2, 3}, rng);
    TensorD w = random_tensor({3, 2}, rng);
    TensorD b = random_tensor({2}, rng);
    const TensorD y = nn::affine(x, w, b);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        double expect = b.at(c);
        for (std::size_t k = 0; k < 3; ++k) expect += x.at(r, k) * w.at(k, c);
        CHECK(y.at(r, c) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("affine rejects mismatched shapes") {
  TensorD x({1, 3});
  TensorD w({2, 2});
  TensorD b({2});
  CHECK_THROWS_AS(nn::affine(x, w, b), ShapeError);
  TensorD bad_b({3});
  TensorD w2({3, 2});
  CHECK_THROWS_AS(nn::affine(x, w2, bad_b), ShapeError);
}

TEST_CASE("affine gradients pass grad_check") {
  RngStream rng(7, 2);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD x = random_tensor({3, 4}, rng);
    TensorD w = random_tensor({4, 2}, rng);
    TensorD b = random_tensor({2}, rng);
    TensorD r = coefficients(TensorD({3, 2}), rng);
    const auto f = [&r](std::vector<TensorD>& in, bool with_grad) {
      TensorD y = nn::affine(in[0], in[1], in[2]);
      if (with_grad) nn::affine_backward(in[0], in[1], in[2], r);
      return weighted_sum(y, r);
    };
    CHECK(nn::grad_check(f, {x, w, b}, 1e-5) < 1e-6);
  }
}

TEST_CASE("embedding_lookup pinned cases") {
  TensorD table({3, 2}, {1.0, 2.0, 0.5, 0.6, -1.0, 4.0});
  IntMatrix ids(1, 1);
  ids.at(0, 0) = 0;
  const TensorD out = nn::embedding_lookup(ids, table);
  CHECK(out.shape == std::vector<std::size_t>{1, 1, 2});
  CHECK(out.values == std::vector<double>{1.0, 2.0});

  IntMatrix bad(1, 1);
  bad.at(0, 0) = 3;
  CHECK_THROWS_AS(nn::embedding_lookup(bad, table), IndexError);
}

TEST_CASE("embedding_backward scatter-adds repeated ids") {
  TensorD table({3, 2});
  IntMatrix ids(1, 2);
  ids.at(0, 0) = 1;
  ids.at(0, 1) = 1;
  TensorD up({1, 2, 2}, {1.0, 2.0, 10.0, 20.0});
  nn::embedding_backward(ids, table, up);
  CHECK(table.grad[2] == 11.0);
  CHECK(table.grad[3] == 22.0);
  CHECK(table.grad[0] == 0.0);
  CHECK(table.grad[4] == 0.0);
}

TEST_CASE("embedding_lookup gradients pass grad_check") {
  RngStream rng(13, 3);
  for (int rep = 0; rep < 5; ++rep) {
    IntMatrix ids(2, 3);
    for (auto& v : ids.values) v = static_cast<int>(rng.below(5));
    TensorD table = random_tensor({5, 4}, rng);
    TensorD r = coefficients(TensorD({2, 3, 4}), rng);
    const auto f = [&ids, &r](std::vector<TensorD>& in, bool with_grad) {
      TensorD out = nn::embedding_lookup(ids, in[0]);
      if (with_grad) nn::embedding_backward(ids, in[0], r);
      return weighted_sum(out, r);
    };
    CHECK(nn::grad_check(f, {table}, 1e-5) < 1e-6);
  }
}

TEST_CASE("lstm_cell pinned cases") {
  const std::size_t hidden = 3;
  nn::LstmParamsT<double> p;
  p.w_x = TensorD({2, 4 * hidden});
  p.w_h = TensorD({hidden, 4 * hidden});
  p.bias = TensorD({4 * hidden});

  TensorD x({1, 2});
  TensorD h({1, hidden});
  TensorD c({1, hidden});
  TensorD h_out, c_out;

  SUBCASE("all-zero parameters and inputs give zero state") {
    nn::lstm_cell<double>(x, h, c, p, nullptr, h_out, c_out, nullptr);
    for (double v : h_out.values) CHECK(v == 0.0);
    for (double v : c_out.values) CHECK(v == 0.0);
  }

  SUBCASE("saturated forget gate carries the cell state") {
    for (std::size_t j = 0; j < hidden; ++j) {
      p.bias.at(hidden + j) = 50.0;   // forget gate wide open
      p.bias.at(j) = -50.0;           // input gate shut
      c.at(0, j) = 0.3 * static_cast<double>(j + 1);
    }
    nn::lstm_cell<double>(x, h, c, p, nullptr, h_out, c_out, nullptr);
    for (std::size_t j = 0; j < hidden; ++j) {
      CHECK(c_out.at(0, j) == doctest::Approx(c.at(0, j)).epsilon(1e-9));
    }
  }

  SUBCASE("shape mismatch throws") {
    TensorD bad_x({1, 3});
    CHECK_THROWS_AS(
        nn::lstm_cell<double>(bad_x, h, c, p, nullptr, h_out, c_out, nullptr),
        ShapeError);
  }
}

TEST_CASE("lstm_cell gradients pass grad_check") {
  RngStream rng(17, 4);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t batch = 2, in_dim = 3, hidden = 4;
    TensorD x = random_tensor({batch, in_dim}, rng);
    TensorD h = random_tensor({batch, hidden}, rng);
    TensorD c = random_tensor({batch, hidden}, rng);
    TensorD w_x = random_tensor({in_dim, 4 * hidden}, rng, -0.5, 0.5);
    TensorD w_h = random_tensor({hidden, 4 * hidden}, rng, -0.5, 0.5);
    TensorD bias = random_tensor({4 * hidden}, rng, -0.5, 0.5);
    TensorD r_h = coefficients(TensorD({batch, hidden}), rng);
    TensorD r_c = coefficients(TensorD({batch, hidden}), rng);

    const auto f = [&](std::vector<TensorD>& in, bool with_grad) {
      nn::LstmParamsT<double> p{in[3], in[4], in[5]};
      TensorD h_out, c_out;
      nn::LstmCellCache<double> cache;
      nn::lstm_cell<double>(in[0], in[1], in[2], p, nullptr, h_out, c_out, &cache);
      const double loss = weighted_sum(h_out, r_h) + weighted_sum(c_out, r_c);
      if (with_grad) {
        nn::lstm_cell_backward<double>(in[0], in[1], in[2], p, nullptr, cache,
                                       r_h, r_c);
        in[3].grad = p.w_x.grad;
        in[4].grad = p.w_h.grad;
        in[5].grad = p.bias.grad;
      }
      return loss;
    };
    CHECK(nn::grad_check(f, {x, h, c, w_x, w_h, bias}, 1e-5) < 1e-6);
  }
}

TEST_CASE("lstm_cell gradients honor a weight-drop mask") {
  RngStream rng(19, 5);
  const std::size_t batch = 2, in_dim = 3, hidden = 3;
  TensorD mask = nn::dropout_mask<double>(DropoutKind::weight_drop, 0.4,
                                          {hidden, 4 * hidden}, rng);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD x = random_tensor({batch, in_dim}, rng);
    TensorD h = random_tensor({batch, hidden}, rng);
    TensorD c = random_tensor({batch, hidden}, rng);
    TensorD w_x = random_tensor({in_dim, 4 * hidden}, rng, -0.5, 0.5);
    TensorD w_h = random_tensor({hidden, 4 * hidden}, rng, -0.5, 0.5);
    TensorD bias = random_tensor({4 * hidden}, rng, -0.5, 0.5);
    TensorD r_h = coefficients(TensorD({batch, hidden}), rng);
    TensorD r_c = coefficients(TensorD({batch, hidden}), rng);

    const auto f = [&](std::vector<TensorD>& in, bool with_grad) {
      nn::LstmParamsT<double> p{in[3], in[4], in[5]};
      TensorD h_out, c_out;
      nn::LstmCellCache<double> cache;
      nn::lstm_cell<double>(in[0], in[1], in[2], p, &mask, h_out, c_out, &cache);
      const double loss = weighted_sum(h_out, r_h) + weighted_sum(c_out, r_c);
      if (with_grad) {
        nn::lstm_cell_backward<double>(in[0], in[1], in[2], p, &mask, cache,
                                       r_h, r_c);
        in[3].grad = p.w_x.grad;
        in[4].grad = p.w_h.grad;
        in[5].grad = p.bias.grad;
      }
      return loss;
    };
    CHECK(nn::grad_check(f, {x, h, c, w_x, w_h, bias}, 1e-5) < 1e-6);
  }
}

TEST_CASE("softmax_cross_entropy pinned cases") {
  TensorD uniform({1, 2}, {0.0, 0.0});
  auto sm = nn::softmax_cross_entropy(uniform, {0});
  CHECK(sm.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(sm.probs.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  TensorD extreme({1, 2}, {100.0, 0.0});
  sm = nn::softmax_cross_entropy(extreme, {0});
  CHECK(sm.loss < 1e-10);
  CHECK(std::isfinite(sm.loss));

  TensorD logits({1, 3});
  CHECK_THROWS_AS(nn::softmax_cross_entropy(logits, {3}), IndexError);
  CHECK_THROWS_AS(nn::softmax_cross_entropy(logits, {0, 1}), ShapeError);
}

TEST_CASE("softmax probabilities stay normalized under extreme logits") {
  RngStream rng(23, 6);
  for (int rep = 0; rep < 20; ++rep) {
    TensorD logits = random_tensor({4, 6}, rng, -100.0, 100.0);
    std::vector<int> targets(4);
    for (auto& t : targets) t = static_cast<int>(rng.below(6));
    const auto sm = nn::softmax_cross_entropy(logits, targets);
    for (std::size_t r = 0; r < 4; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < 6; ++c) {
        row += sm.probs.at(r, c);
        CHECK(sm.probs.at(r, c) >= 0.0);
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("softmax_cross_entropy matches a brute-force oracle") {
  RngStream rng(29, 7);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD logits = random_tensor({4, 5}, rng, -3.0, 3.0);
    std::vector<int> targets(4);
    for (auto& t : targets) t = static_cast<int>(rng.below(5));

    const auto sm = nn::softmax_cross_entropy(logits, targets);

    double expect = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      double denom = 0.0;
      for (std::size_t c = 0; c < 5; ++c) denom += std::exp(logits.at(r, c));
      for (std::size_t c = 0; c < 5; ++c) {
        CHECK(sm.probs.at(r, c) ==
              doctest::Approx(std::exp(logits.at(r, c)) / denom).epsilon(1e-9));
      }
      expect -= std::log(std::exp(logits.at(r, targets[r])) / denom);
    }
    CHECK(sm.loss == doctest::Approx(expect / 4.0).epsilon(1e-9));

    TensorD grads = logits;
    nn::softmax_cross_entropy_backward(grads, targets, sm);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        const double onehot = targets[r] == static_cast<int>(c) ? 1.0 : 0.0;
        CHECK(grads.grad[r * 5 + c] ==
              doctest::Approx((sm.probs.at(r, c) - onehot) / 4.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("softmax_cross_entropy gradients pass grad_check") {
  RngStream rng(31, 8);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD logits = random_tensor({3, 4}, rng, -2.0, 2.0);
    std::vector<int> targets(3);
    for (auto& t : targets) t = static_cast<int>(rng.below(4));
    const auto f = [&targets](std::vector<TensorD>& in, bool with_grad) {
      const auto sm = nn::softmax_cross_entropy(in[0], targets);
      if (with_grad) nn::softmax_cross_entropy_backward(in[0], targets, sm);
      return sm.loss;
    };
    CHECK(nn::grad_check(f, {logits}, 1e-5) < 1e-6);
  }
}

TEST_CASE("affine + cross entropy composite passes grad_check") {
  RngStream rng(37, 9);
  for (int rep = 0; rep < 5; ++rep) {
    TensorD x = random_tensor({3, 4}, rng);
    TensorD w = random_tensor({4, 3}, rng);
    TensorD b = random_tensor({3}, rng);
    std::vector<int> targets(3);
    for (auto& t : targets) t = static_cast<int>(rng.below(3));
    const auto f = [&targets](std::vector<TensorD>& in, bool with_grad) {
      TensorD logits = nn::affine(in[0], in[1], in[2]);
      const auto sm = nn::softmax_cross_entropy(logits, targets);
      if (with_grad) {
        nn::softmax_cross_entropy_backward(logits, targets, sm);
        TensorD up(logits.shape, logits.grad);
        nn::affine_backward(in[0], in[1], in[2], up);
      }
      return sm.loss;
    };
    CHECK(nn::grad_check(f, {x, w, b}, 1e-5) < 1e-6);
  }
}

TEST_CASE("grad_check detects a corrupted backward") {
  RngStream rng(41, 10);
  TensorD x = random_tensor({4}, rng);
  const auto broken = [](std::vector<TensorD>& in, bool with_grad) {
    double s = 0.0;
    for (double v : in[0].values) s += v * v;
    if (with_grad) {
      in[0].ensure_grad();
      for (std::size_t i = 0; i < in[0].numel(); ++i) {
        in[0].grad[i] += 4.0 * in[0].values[i];  // should be 2x
      }
    }
    return s;
  };
  const double err = nn::grad_check(broken, {x}, 1e-5);
  CHECK(err > 0.4);
  CHECK(err < 0.6);
}

TEST_CASE("grad_check accepts an exact quadratic") {
  RngStream rng(43, 11);
  TensorD x = random_tensor({6}, rng);
  const auto f = [](std::vector<TensorD>& in, bool with_grad) {
    double s = 0.0;
    for (double v : in[0].values) s += v * v;
    if (with_grad) {
      in[0].ensure_grad();
      for (std::size_t i = 0; i < in[0].numel(); ++i) {
        in[0].grad[i] += 2.0 * in[0].values[i];
      }
    }
    return s;
  };
  CHECK(nn::grad_check(f, {x}, 1e-5) < 1e-8);
}

TEST_CASE("dropout_mask contracts") {
  RngStream rng(47, 12);

  SUBCASE("p = 0 is the identity mask") {
    TensorD mask = nn::dropout_mask<double>(DropoutKind::standard, 0.0, {3, 3}, rng);
    for (double v : mask.values) CHECK(v == 1.0);
  }

  SUBCASE("p >= 1 or p < 0 is rejected") {
    CHECK_THROWS_AS(nn::dropout_mask<double>(DropoutKind::standard, 1.0, {2}, rng),
                    ConfigError);
    CHECK_THROWS_AS(nn::dropout_mask<double>(DropoutKind::standard, -0.1, {2}, rng),
                    ConfigError);
  }

  SUBCASE("keep rate and scaling at p = 0.5") {
    TensorD mask =
        nn::dropout_mask<double>(DropoutKind::standard, 0.5, {100000}, rng);
    std::size_t kept = 0;
    for (double v : mask.values) {
      if (v != 0.0) {
        CHECK(v == 2.0);
        ++kept;
      }
    }
    const double rate = static_cast<double>(kept) / 100000.0;
    CHECK(rate > 0.49);
    CHECK(rate < 0.51);
  }

  SUBCASE("embedding_row zeroes whole rows") {
    TensorD mask = nn::dropout_mask<double>(DropoutKind::embedding_row, 0.5,
                                            {200, 8}, rng);
    for (std::size_t r = 0; r < 200; ++r) {
      const double first = mask.at(r, 0);
      for (std::size_t c = 1; c < 8; ++c) CHECK(mask.at(r, c) == first);
      CHECK((first == 0.0 || first == 2.0));
    }
  }

  SUBCASE("same stream gives the same mask") {
    RngStream a(9, rng_stream::kDropout);
    RngStream b(9, rng_stream::kDropout);
    TensorD ma = nn::dropout_mask<double>(DropoutKind::locked, 0.3, {4, 5}, a);
    TensorD mb = nn::dropout_mask<double>(DropoutKind::locked, 0.3, {4, 5}, b);
    CHECK(ma.values == mb.values);
  }
}

TEST_CASE("adam_step pinned behavior") {
  nn::AdamStateT<double> adam;

  SUBCASE("zero gradients leave parameters unchanged") {
    TensorD p({3}, {0.5, -0.25, 1.0});
    p.ensure_grad();
    const std::vector<double> before = p.values;
    adam.step("p", p, 0.1);
    adam.step("p", p, 0.1);
    CHECK(p.values == before);
    CHECK(adam.steps("p") == 2);
  }

  SUBCASE("bias-corrected first step moves by about lr") {
    TensorD p({1}, {0.0});
    p.ensure_grad();
    p.grad[0] = 1.0;
    adam.step("p", p, 0.1);
    CHECK(p.values[0] == doctest::Approx(-0.1).epsilon(1e-6));
  }

  SUBCASE("identical update sequences are bit-identical") {
    TensorD a({4}, {0.1, 0.2, 0.3, 0.4});
    TensorD b = a;
    nn::AdamStateT<double> s1, s2;
    RngStream rng(51, 13);
    for (int i = 0; i < 10; ++i) {
      a.ensure_grad();
      b.ensure_grad();
      for (std::size_t k = 0; k < 4; ++k) {
        const double g = rng.uniform(-1.0, 1.0);
        a.grad[k] = g;
        b.grad[k] = g;
      }
      s1.step("t", a, 0.01);
      s2.step("t", b, 0.01);
    }
    CHECK(a.values == b.values);
  }

  SUBCASE("non-finite gradient names the parameter") {
    TensorD p({1}, {0.0});
    p.ensure_grad();
    p.grad[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(adam.step("decoder.bias", p, 0.1),
                         doctest::Contains("decoder.bias"), NumericsError);
  }
}

TEST_CASE("clip_global_norm scales to the budget and reports the pre-clip norm") {
  TensorD a({2}, {3.0, 0.0});
  TensorD b({1}, {4.0});
  a.ensure_grad();
  b.ensure_grad();
  a.grad = {3.0, 0.0};
  b.grad = {4.0};
  const double norm = nn::clip_global_norm<double>({&a, &b}, 1.0);
  CHECK(norm == doctest::Approx(5.0).epsilon(1e-12));
  const double after =
      std::sqrt(a.grad[0] * a.grad[0] + a.grad[1] * a.grad[1] + b.grad[0] * b.grad[0]);
  CHECK(after == doctest::Approx(1.0).epsilon(1e-6));

  a.grad = {0.1, 0.0};
  b.grad = {0.2};
  nn::clip_global_norm<double>({&a, &b}, 1.0);
  CHECK(a.grad[0] == 0.1);
  CHECK(b.grad[0] == 0.2);
}
