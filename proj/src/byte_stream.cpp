#include "qtp/byte_stream.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <vector>

#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "qtp/errors.hpp"

namespace qtp {

std::size_t read_exact(ByteStream& stream, std::span<std::uint8_t> buffer) {
  std::size_t filled = 0;
  while (filled < buffer.size()) {
    const std::size_t got = stream.read_some(buffer.subspan(filled));
    if (got == 0) break;
    filled += got;
  }
  return filled;
}

// In-memory duplex --------------------------------------------------------------

namespace {

struct Pipe {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::uint8_t> bytes;
  bool closed = false;

  void push(std::span<const std::uint8_t> data) {
    {
      std::lock_guard lock(mutex);
      if (closed) throw SessionError("write to a closed stream");
      bytes.insert(bytes.end(), data.begin(), data.end());
    }
    ready.notify_all();
  }

  std::size_t pop(std::span<std::uint8_t> out) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return !bytes.empty() || closed; });
    const std::size_t n = std::min(out.size(), bytes.size());
    std::copy_n(bytes.begin(), n, out.begin());
    bytes.erase(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
    return n;
  }

  void close() {
    {
      std::lock_guard lock(mutex);
      closed = true;
    }
    ready.notify_all();
  }
};

class MemoryEndpoint final : public ByteStream {
 public:
  MemoryEndpoint(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~MemoryEndpoint() override { close(); }

  void write(std::span<const std::uint8_t> bytes) override { out_->push(bytes); }
  std::size_t read_some(std::span<std::uint8_t> buffer) override { return in_->pop(buffer); }
  void close() override { out_->close(); }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_memory_duplex() {
  auto a_to_b = std::make_shared<Pipe>();
  auto b_to_a = std::make_shared<Pipe>();
  return {std::make_unique<MemoryEndpoint>(b_to_a, a_to_b),
          std::make_unique<MemoryEndpoint>(a_to_b, b_to_a)};
}

// TCP --------------------------------------------------------------------------

namespace {

std::string errno_text() { return std::strerror(errno); }

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {}
  ~TcpStream() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void write(std::span<const std::uint8_t> bytes) override {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw SessionError("send failed: " + errno_text());
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::size_t read_some(std::span<std::uint8_t> buffer) override {
    for (;;) {
      const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw SessionError("recv failed: " + errno_text());
    }
  }

  void close() override {
    if (!shut_) ::shutdown(fd_, SHUT_WR);
    shut_ = true;
  }

 private:
  int fd_;
  bool shut_ = false;
};

struct AddrInfoDeleter {
  void operator()(addrinfo* p) const { ::freeaddrinfo(p); }
};

std::unique_ptr<addrinfo, AddrInfoDeleter> resolve(const std::string& host, std::uint16_t port,
                                                   bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &result);
  if (rc != 0) throw SessionError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  return std::unique_ptr<addrinfo, AddrInfoDeleter>(result);
}

}  // namespace

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  auto addrs = resolve(host, port, true);
  for (addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  if (fd_ < 0) throw SessionError("cannot listen on " + host + ":" + std::to_string(port));

  sockaddr_storage bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  if (bound.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<ByteStream> TcpListener::accept(int timeout_ms) {
  pollfd pfd{fd_, POLLIN, 0};
  int rc = 0;
  do {
    rc = ::poll(&pfd, 1, timeout_ms);
  } while (rc < 0 && errno == EINTR);
  if (rc == 0) throw SessionError("timed out waiting for a peer");
  if (rc < 0) throw SessionError("poll failed: " + errno_text());
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) throw SessionError("accept failed: " + errno_text());
  return std::make_unique<TcpStream>(fd);
}

std::unique_ptr<ByteStream> tcp_connect(const std::string& host, std::uint16_t port) {
  auto addrs = resolve(host, port, false);
  for (addrinfo* ai = addrs.get(); ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return std::make_unique<TcpStream>(fd);
    ::close(fd);
  }
  throw SessionError("cannot connect to " + host + ":" + std::to_string(port));
}

// Transport selection ----------------------------------------------------------

TransportSpec TransportSpec::parse(std::string_view text) {
  if (text == "memory") return TransportSpec{};
  constexpr std::string_view prefix = "tcp:";
  if (text.substr(0, prefix.size()) != prefix) {
    throw ValidationError("transport must be 'memory' or 'tcp:<host>:<port>', got '" +
                          std::string(text) + "'");
  }
  const std::string_view rest = text.substr(prefix.size());
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ValidationError("tcp transport needs <host>:<port>, got '" + std::string(rest) + "'");
  }
  const std::string_view port_text = rest.substr(colon + 1);
  unsigned port = 0;
  const auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || end != port_text.data() + port_text.size() || port > 65535) {
    throw ValidationError("bad tcp port '" + std::string(port_text) + "'");
  }
  TransportSpec spec;
  spec.kind = Kind::tcp;
  spec.host = std::string(rest.substr(0, colon));
  spec.port = static_cast<std::uint16_t>(port);
  return spec;
}

std::string TransportSpec::to_string() const {
  if (kind == Kind::memory) return "memory";
  return "tcp:" + host + ":" + std::to_string(port);
}

Link make_link(const TransportSpec& spec) {
  if (spec.kind == TransportSpec::Kind::memory) {
    auto ends = std::make_shared<std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>>>(
        make_memory_duplex());
    return Link{[ends] { return std::move(ends->first); }, [ends] { return std::move(ends->second); }};
  }
  auto listener = std::make_shared<TcpListener>(spec.host, spec.port);
  const std::string host = spec.host;
  return Link{[listener, host] { return tcp_connect(host, listener->port()); },
              [listener] { return listener->accept(); }};
}

// Fault injection --------------------------------------------------------------

namespace {

class FaultyStream final : public ByteStream {
 public:
  FaultyStream(std::unique_ptr<ByteStream> inner, Fault fault, std::size_t offset)
      : inner_(std::move(inner)), fault_(fault), offset_(offset) {}

  void write(std::span<const std::uint8_t> bytes) override {
    if (fault_ == Fault::drop) return;
    std::vector<std::uint8_t> copy(bytes.begin(), bytes.end());
    if (offset_ >= written_ && offset_ - written_ < copy.size()) copy[offset_ - written_] ^= 0xFF;
    written_ += copy.size();
    inner_->write(copy);
  }
  std::size_t read_some(std::span<std::uint8_t> buffer) override { return inner_->read_some(buffer); }
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<ByteStream> inner_;
  Fault fault_;
  std::size_t offset_;
  std::size_t written_ = 0;
};

}  // namespace

Link with_fault(Link link, Fault fault, std::size_t byte_offset) {
  auto open = std::move(link.open_alice);
  link.open_alice = [open = std::move(open), fault, byte_offset] {
    return std::unique_ptr<ByteStream>(std::make_unique<FaultyStream>(open(), fault, byte_offset));
  };
  return link;
}

}  // namespace qtp
