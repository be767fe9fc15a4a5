#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "layers.hpp"
#include "vidart/error.hpp"
#include "vidart/model.hpp"

namespace vidart::model {

HeadOutputs predict_heads(const SeqRepresentation& v, const ModelParams& params) {
  if (static_cast<int>(v.size()) != params.config().rmvit.out_dim) {
    throw Error(ErrorKind::Shape, "sequence representation has " + std::to_string(v.size()) + " values, expected " +
                                      std::to_string(params.config().rmvit.out_dim));
  }
  HeadOutputs out;
  for (const auto k : synth::kAllArtifacts) {
    const std::string p = "head." + std::string(synth::name(k));
    auto hidden = detail::linear(v, params.tensor(p + ".fc1.weight"), params.tensor(p + ".fc1.bias"));
    detail::gelu_inplace(hidden);
    const float logit = detail::linear(hidden, params.tensor(p + ".fc2.weight"), params.tensor(p + ".fc2.bias"))[0];
    const double prob = 1.0 / (1.0 + std::exp(-static_cast<double>(logit)));
    out[static_cast<std::size_t>(synth::index(k))] = {prob, decide(prob)};
  }
  return out;
}

HeadOutputs detector_forward(const io::Clip& clip, const ModelParams& params, int jobs) {
  clip.validate();
  const std::size_t n = clip.frames.size();
  std::vector<FrameEmbedding> emb(n);
  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(n)));

  // Each frame lands in its own slot, so the result does not depend on scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        emb[i] = adfe_forward(clip.frames[i], params);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return predict_heads(rmvit_forward(emb, params), params);
}

}  // namespace vidart::model
