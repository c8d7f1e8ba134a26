#include "simulmt/subprocess_model.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <set>

namespace simulmt {

using nlohmann::json;

struct SubprocessModel::Process {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;
  std::string buffer;

  ~Process() {
    if (to_child >= 0) ::close(to_child);
    if (from_child >= 0) ::close(from_child);
    if (pid > 0) {
      ::kill(pid, SIGTERM);
      int status = 0;
      ::waitpid(pid, &status, 0);
    }
  }
};

namespace {

std::once_flag sigpipe_once;

void ignore_sigpipe() {
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::unique_ptr<SubprocessModel::Process> spawn(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ModelError("empty model command line");
  ignore_sigpipe();

  int in_pipe[2];   // parent -> child stdin
  int out_pipe[2];  // child stdout -> parent
  if (::pipe(in_pipe) != 0) throw ModelError("pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ModelError("pipe failed");
  }

  pid_t pid = ::fork();
  if (pid < 0) throw ModelError("fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }

  auto proc = std::make_unique<SubprocessModel::Process>();
  proc->pid = pid;
  proc->to_child = in_pipe[1];
  proc->from_child = out_pipe[0];
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  return proc;
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ModelError(std::string("write to model process failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string read_line(SubprocessModel::Process& proc, double timeout_seconds) {
  using clock = std::chrono::steady_clock;
  auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                     std::chrono::duration<double>(timeout_seconds));
  for (;;) {
    auto nl = proc.buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = proc.buffer.substr(0, nl);
      proc.buffer.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - clock::now());
    if (remaining.count() <= 0) throw ModelError("timeout waiting for model reply");
    struct pollfd pfd {
      proc.from_child, POLLIN, 0
    };
    int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ModelError("poll on model process failed");
    }
    if (rc == 0) throw ModelError("timeout waiting for model reply");
    char chunk[4096];
    ssize_t n = ::read(proc.from_child, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ModelError("read from model process failed");
    }
    if (n == 0) throw ModelError("model process closed its output");
    proc.buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

SubprocessModel::SubprocessModel(std::vector<std::string> argv)
    : SubprocessModel(std::move(argv), Options{}) {}

SubprocessModel::SubprocessModel(std::vector<std::string> argv, Options options)
    : argv_(std::move(argv)), options_(options) {}

SubprocessModel::~SubprocessModel() = default;

Distribution SubprocessModel::query(const Sentence& src, const Sentence& tgt) const {
  if (!proc_) proc_ = spawn(argv_);

  json request;
  request["src"] = src;
  request["tgt"] = tgt;
  request["top_k"] = options_.top_k;
  write_all(proc_->to_child, request.dump() + "\n");

  std::string line = read_line(*proc_, options_.timeout_seconds);
  json reply = json::parse(line, nullptr, false);
  if (reply.is_discarded()) throw ModelError("malformed model reply: " + line);
  if (!reply.contains("tokens") || !reply.contains("logprobs") ||
      !reply["tokens"].is_array() || !reply["logprobs"].is_array())
    throw ModelError("model reply missing tokens/logprobs arrays");
  if (reply["tokens"].size() != reply["logprobs"].size())
    throw ModelError("model reply arrays have mismatched lengths");
  if (reply["tokens"].empty()) throw ModelError("model reply holds no tokens");

  std::vector<std::pair<Token, double>> entries;
  for (std::size_t i = 0; i < reply["tokens"].size(); ++i) {
    if (!reply["tokens"][i].is_string() || !reply["logprobs"][i].is_number())
      throw ModelError("model reply holds non-string token or non-numeric logprob");
    entries.emplace_back(reply["tokens"][i].get<std::string>(),
                         std::exp(reply["logprobs"][i].get<double>()));
  }
  Distribution dist(std::move(entries), /*normalize=*/true);

  std::set<Token> seen(vocab_.begin(), vocab_.end());
  for (const auto& [tok, p] : dist.entries())
    if (!is_eos(tok)) seen.insert(tok);
  vocab_.assign(seen.begin(), seen.end());
  return dist;
}

Distribution SubprocessModel::next_distribution(const Sentence& source_prefix,
                                                const Sentence& target_prefix) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(source_prefix, target_prefix);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Distribution dist = query(source_prefix, target_prefix);
  cache_.emplace(std::move(key), dist);
  return dist;
}

const std::vector<Token>& SubprocessModel::vocabulary() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return vocab_;
}

}  // namespace simulmt
