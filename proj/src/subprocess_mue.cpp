#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "vtt/csv.hpp"
#include "vtt/mue.hpp"

namespace vtt {

SubprocessMuE::SubprocessMuE(const std::string& command, const Dataset& dataset,
                             std::chrono::milliseconds timeout)
    : dataset_(dataset), timeout_(timeout) {
  // A dead child must surface as EPIPE on write, not as process death.
  static const bool sigpipe_ignored = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw AdapterError("cannot create pipes for subprocess MuE");
  }
  const pid_t pid = fork();
  if (pid < 0) {
    throw AdapterError("cannot fork subprocess MuE");
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

SubprocessMuE::~SubprocessMuE() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (child_pid_ > 0) {
    // Closing stdin usually ends the child; reap it, escalating if needed.
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(child_pid_, &status, WNOHANG) != 0) return;
      usleep(10 * 1000);
    }
    kill(child_pid_, SIGKILL);
    waitpid(child_pid_, &status, 0);
  }
}

std::string SubprocessMuE::read_reply_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      throw AdapterError("subprocess MuE reply timed out after " +
                         std::to_string(timeout_.count()) + " ms");
    }
    const auto wait =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(wait.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("poll on subprocess MuE failed: ") +
                         std::strerror(errno));
    }
    if (ready == 0) {
      throw AdapterError("subprocess MuE reply timed out after " +
                         std::to_string(timeout_.count()) + " ms");
    }
    char chunk[512];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("read from subprocess MuE failed: ") +
                         std::strerror(errno));
    }
    if (n == 0) {
      throw AdapterError("subprocess MuE closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

double SubprocessMuE::answer(const Question& q) {
  std::lock_guard<std::mutex> lock(io_mutex_);
  const std::string request =
      dataset_.sample_names[static_cast<std::size_t>(q.sample)] + "," +
      dataset_.concept_names[static_cast<std::size_t>(q.concept_id)] + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t n = write(to_child_, request.data() + written,
                            request.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("write to subprocess MuE failed: ") +
                         std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }

  const std::string line = read_reply_line();
  double prob;
  try {
    prob = csv::parse_double(line);
  } catch (const std::invalid_argument&) {
    throw AdapterError("subprocess MuE reply is not a number: '" + line + "'");
  }
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw AdapterError("subprocess MuE reply outside [0, 1]: " + line);
  }
  return prob;
}

}  // namespace vtt
