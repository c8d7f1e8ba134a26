#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "simulmt/model.hpp"

namespace simulmt {

// Adapter around an external scorer speaking newline-delimited JSON on
// stdin/stdout: request {"src":[...],"tgt":[...],"top_k":K}, reply
// {"tokens":[...],"logprobs":[...]} with equal-length arrays, one reply per
// request in order. Replies are renormalized over the returned tokens and
// cached per (src, tgt) so the adapter honors the purity contract even if
// the child misbehaves. Calls are serialized over the single channel.
class SubprocessModel : public IncrementalModel {
 public:
  struct Options {
    int top_k = 16;
    double timeout_seconds = 10.0;
  };
  struct Process;

  explicit SubprocessModel(std::vector<std::string> argv);
  SubprocessModel(std::vector<std::string> argv, Options options);
  ~SubprocessModel() override;

  SubprocessModel(const SubprocessModel&) = delete;
  SubprocessModel& operator=(const SubprocessModel&) = delete;

  Distribution next_distribution(const Sentence& source_prefix,
                                 const Sentence& target_prefix) const override;
  const std::vector<Token>& vocabulary() const override;

 private:
  Distribution query(const Sentence& src, const Sentence& tgt) const;

  std::vector<std::string> argv_;
  Options options_;
  mutable std::unique_ptr<Process> proc_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<Sentence, Sentence>, Distribution> cache_;
  mutable std::vector<Token> vocab_;  // accumulated from replies
};

}  // namespace simulmt
