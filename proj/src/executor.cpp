// Copyright 2026 the mare-cpp authors
// SPDX-License-Identifier: Apache-2.0

#include "mare/executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include "mare/errors.hpp"

namespace mare {
namespace {

constexpr size_t kStderrTailBytes = 8 * 1024;

void drain(int fd, std::string& sink) {
  char buf[4096];
  for (;;) {
    ssize_t n = read(fd, buf, sizeof(buf));
    if (n <= 0) break;
    sink.append(buf, static_cast<size_t>(n));
  }
}

}  // namespace

std::string stderr_tail(const TaskOutcome& outcome) {
  const std::string& e = outcome.stderr_bytes;
  if (e.size() <= kStderrTailBytes) return e;
  return e.substr(e.size() - kStderrTailBytes);
}

TaskOutcome run_argv(const std::vector<std::string>& argv,
                     const std::vector<std::pair<std::string, std::string>>& env,
                     double timeout_s) {
  if (argv.empty()) throw ConfigError("empty argv");

  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw EnvironmentError("pipe() failed: " + std::string(std::strerror(errno)));

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0)
    throw EnvironmentError("fork() failed: " + std::string(std::strerror(errno)));

  if (pid == 0) {
    // Child: own process group so a timeout kill reaps the whole pipeline.
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    for (const auto& [k, v] : env) setenv(k.c_str(), v.c_str(), 1);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    perror("execvp");
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  TaskOutcome outcome;
  bool killed = false;
  int open_fds = 2;
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};

  auto expired = [&] {
    if (timeout_s <= 0) return false;
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    return elapsed > timeout_s;
  };

  int status = 0;
  bool reaped = false;
  while (!reaped) {
    if (!killed && expired()) {
      kill(-pid, SIGKILL);
      killed = true;
    }
    if (open_fds > 0) {
      poll(fds, 2, 50);
      for (auto& pfd : fds) {
        if (pfd.fd < 0) continue;
        if (pfd.revents & (POLLIN | POLLHUP)) {
          std::string& sink =
              (pfd.fd == out_pipe[0]) ? outcome.stdout_bytes : outcome.stderr_bytes;
          char buf[4096];
          ssize_t n;
          while ((n = read(pfd.fd, buf, sizeof(buf))) > 0)
            sink.append(buf, static_cast<size_t>(n));
          if (n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK)) {
            close(pfd.fd);
            pfd.fd = -1;
            --open_fds;
          }
        }
      }
    }
    pid_t r = waitpid(pid, &status, open_fds > 0 ? WNOHANG : 0);
    if (r == pid) reaped = true;
    if (r == 0 && open_fds == 0) {
      // Output closed but child alive (e.g. it closed its fds); wait blocking
      // unless a timeout may still fire.
      if (timeout_s > 0) {
        usleep(50 * 1000);
      } else {
        waitpid(pid, &status, 0);
        reaped = true;
      }
    }
  }
  // Final drain for anything buffered between last poll and exit.
  for (auto& pfd : fds) {
    if (pfd.fd >= 0) {
      drain(pfd.fd, pfd.fd == out_pipe[0] ? outcome.stdout_bytes
                                          : outcome.stderr_bytes);
      close(pfd.fd);
    }
  }

  outcome.wall_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  if (killed) {
    outcome.exit_code = std::nullopt;
  } else if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.exit_code = 128 + WTERMSIG(status);
  } else {
    outcome.exit_code = -1;
  }
  return outcome;
}

std::string SubprocessBackend::substitute_paths(const std::string& command,
                                                const std::vector<Bind>& binds) {
  // Longest container path first so "/counts" never matches inside "/count".
  std::vector<const Bind*> order;
  for (const auto& b : binds) order.push_back(&b);
  std::sort(order.begin(), order.end(), [](const Bind* a, const Bind* b) {
    return a->container.size() > b->container.size();
  });
  std::string out = command;
  for (const Bind* b : order) {
    const std::string& from = b->container;
    const std::string to = b->host.string();
    if (from.empty()) continue;
    size_t pos = 0;
    while ((pos = out.find(from, pos)) != std::string::npos) {
      out.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return out;
}

TaskOutcome SubprocessBackend::run(const ContainerTask& task) {
  const std::string cmd = substitute_paths(task.command, task.binds);
  return run_argv({"/bin/sh", "-c", cmd}, task.env, task.timeout_s);
}

void DockerBackend::ensure_image(const std::string& image) {
  {
    std::lock_guard lock(mu_);
    if (present_.count(image)) return;
  }
  auto inspect = run_argv({cli_, "image", "inspect", image}, {}, 60);
  if (!inspect.ok()) {
    auto pull = run_argv({cli_, "pull", image}, {}, 0);
    if (!pull.ok())
      throw EnvironmentError("image " + image + " not present and not pullable: " +
                             stderr_tail(pull));
  }
  std::lock_guard lock(mu_);
  present_.insert(image);
}

TaskOutcome DockerBackend::run(const ContainerTask& task) {
  if (task.image.empty())
    throw ConfigError("container backend requires a non-empty image name");
  ensure_image(task.image);
  std::vector<std::string> argv = {cli_, "run", "--rm"};
  for (const auto& b : task.binds) {
    std::string vol = b.host.string() + ":" + b.container;
    if (b.read_only) vol += ":ro";
    argv.push_back("-v");
    argv.push_back(vol);
  }
  for (const auto& [k, v] : task.env) {
    argv.push_back("-e");
    argv.push_back(k + "=" + v);
  }
  if (task.cpu_limit) {
    argv.push_back("--cpus");
    argv.push_back(std::to_string(*task.cpu_limit));
  }
  argv.push_back(task.image);
  argv.push_back("sh");
  argv.push_back("-c");
  argv.push_back(task.command);
  return run_argv(argv, {}, task.timeout_s);
}

BackendProbe probe_backend(const ExecutorConfig& cfg) {
  BackendProbe p;
  try {
    auto info = run_argv({"docker", "info"}, {}, 10);
    p.container_available = info.ok();
  } catch (const EnvironmentError&) {
    p.container_available = false;
  }
  switch (cfg.backend) {
    case BackendMode::container:
      p.selected = "container";
      break;
    case BackendMode::subprocess:
      p.selected = "subprocess";
      break;
    case BackendMode::auto_select:
      p.selected = p.container_available ? "container" : "subprocess";
      break;
  }
  return p;
}

std::unique_ptr<Backend> make_backend(const ExecutorConfig& cfg) {
  auto probe = probe_backend(cfg);
  if (probe.selected == "container") {
    if (!probe.container_available)
      throw EnvironmentError(
          "container backend requested but the container engine is unreachable");
    return std::make_unique<DockerBackend>();
  }
  return std::make_unique<SubprocessBackend>();
}

}  // namespace mare
