#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>

#include "adabo/errors.hpp"
#include "adabo/harness.hpp"
#include "json.hpp"

namespace adabo {
namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
  int fds[2] = {-1, -1};
  ~Pipe() {
    if (fds[0] >= 0) close(fds[0]);
    if (fds[1] >= 0) close(fds[1]);
  }
  void close_read() {
    if (fds[0] >= 0) close(fds[0]);
    fds[0] = -1;
  }
  void close_write() {
    if (fds[1] >= 0) close(fds[1]);
    fds[1] = -1;
  }
};

int remaining_ms(Clock::time_point deadline) {
  const auto left =
      std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(std::min<long long>(left, 60'000));
}

// Reaps the child; kills it first when the deadline has passed or force is
// set. Returns the wait status. The child leads its own process group, and
// the kills target the whole group: /bin/sh forks for its command, so
// killing the shell alone would orphan helpers that keep our inherited
// descriptors open.
int reap(pid_t pid, Clock::time_point deadline, bool force) {
  if (force) kill(-pid, SIGKILL);
  while (true) {
    int status = 0;
    const pid_t r = waitpid(pid, &status, force ? 0 : WNOHANG);
    if (r == pid) {
      kill(-pid, SIGKILL);  // sweep anything the command left running
      return status;
    }
    if (r < 0 && errno != EINTR) return -1;
    if (!force) {
      if (Clock::now() >= deadline) {
        kill(-pid, SIGKILL);
        force = true;
      } else {
        usleep(2000);
      }
    }
  }
}

}  // namespace

std::string external_request_line(const Point& p, const ParamSpace& space) {
  space.validate_point(p);
  nlohmann::ordered_json req;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Dimension& d = space.dim(i);
    if (d.kind == DimKind::Integer) {
      req[d.name] = static_cast<long long>(std::llround(p.values[i]));
    } else {
      req[d.name] = p.values[i];
    }
  }
  return req.dump();
}

double external_objective(const std::string& command, const Point& p, const ParamSpace& space,
                          double timeout_s) {
  // A child that exits early must not kill us on write.
  static const bool sigpipe_ignored = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;

  const std::string request = external_request_line(p, space) + "\n";
  const auto deadline =
      Clock::now() + std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));

  Pipe to_child, from_child;
  if (pipe2(to_child.fds, O_CLOEXEC) != 0 || pipe2(from_child.fds, O_CLOEXEC) != 0)
    throw EvalError("external: pipe failed: " + std::string(std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0) throw EvalError("external: fork failed: " + std::string(std::strerror(errno)));
  if (pid == 0) {
    setpgid(0, 0);  // group leader, so cleanup can reach every descendant
    // dup2 clears the close-on-exec flag on 0/1; everything else goes away
    // at exec.
    if (dup2(to_child.fds[0], 0) < 0 || dup2(from_child.fds[1], 1) < 0) _exit(127);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);  // mirror of the child's call, closes the startup race
  to_child.close_read();
  from_child.close_write();

  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t w =
        write(to_child.fds[1], request.data() + written, request.size() - written);
    if (w > 0) {
      written += static_cast<std::size_t>(w);
      continue;
    }
    if (w < 0 && errno == EINTR) continue;
    break;  // EPIPE etc.: the child may answer without reading
  }
  to_child.close_write();

  std::string reply;
  bool timed_out = false;
  while (reply.find('\n') == std::string::npos) {
    pollfd pfd{from_child.fds[0], POLLIN, 0};
    const int pr = poll(&pfd, 1, remaining_ms(deadline));
    if (pr < 0 && errno == EINTR) continue;
    if (pr == 0) {
      if (Clock::now() >= deadline) {
        timed_out = true;
        break;
      }
      continue;
    }
    char buf[4096];
    const ssize_t r = read(from_child.fds[0], buf, sizeof(buf));
    if (r > 0) {
      reply.append(buf, static_cast<std::size_t>(r));
    } else if (r == 0) {
      break;  // EOF
    } else if (errno != EINTR) {
      break;
    }
  }
  from_child.close_read();

  const int status = reap(pid, deadline, timed_out);
  if (timed_out) throw EvalError("external: timed out after " + std::to_string(timeout_s) + " s");
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw EvalError("external: command failed (status " +
                    std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) + ")");

  const auto eol = reply.find('\n');
  const std::string line = eol == std::string::npos ? reply : reply.substr(0, eol);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw EvalError("external: reply is not valid JSON: " + line);
  }
  if (!parsed.is_object() || !parsed.contains("objective") || !parsed["objective"].is_number())
    throw EvalError("external: reply lacks a numeric 'objective': " + line);
  const double value = parsed["objective"].get<double>();
  if (!std::isfinite(value)) throw EvalError("external: objective is not finite");
  return value;
}

}  // namespace adabo
