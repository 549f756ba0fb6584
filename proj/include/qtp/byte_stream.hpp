#pragma once

// Reliable ordered byte streams carrying the classical leg of the protocol.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace qtp {

class ByteStream {
 public:
  virtual ~ByteStream() = default;

  virtual void write(std::span<const std::uint8_t> bytes) = 0;
  // Blocks until at least one byte is available; returns 0 at end of stream.
  virtual std::size_t read_some(std::span<std::uint8_t> buffer) = 0;
  // Ends the sending direction. Idempotent.
  virtual void close() = 0;
};

// Reads until the buffer is full or the stream ends; returns the byte count.
std::size_t read_exact(ByteStream& stream, std::span<std::uint8_t> buffer);

// Two connected in-process endpoints.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_memory_duplex();

class TcpListener {
 public:
  // Binds and listens; port 0 picks an ephemeral port. Throws SessionError.
  TcpListener(const std::string& host, std::uint16_t port);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  // Waits up to timeout_ms for a peer. Throws SessionError on timeout.
  std::unique_ptr<ByteStream> accept(int timeout_ms = 10000);

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

std::unique_ptr<ByteStream> tcp_connect(const std::string& host, std::uint16_t port);

struct TransportSpec {
  enum class Kind { memory, tcp };
  Kind kind = Kind::memory;
  std::string host;
  std::uint16_t port = 0;

  // "memory" or "tcp:<host>:<port>". Throws ValidationError.
  static TransportSpec parse(std::string_view text);
  std::string to_string() const;
};

// Factories for the two ends of one connection. open_bob may block until
// open_alice has been called from another thread (TCP accept).
struct Link {
  std::function<std::unique_ptr<ByteStream>()> open_alice;
  std::function<std::unique_ptr<ByteStream>()> open_bob;
};

Link make_link(const TransportSpec& spec);

enum class Fault { drop, corrupt };

// Wraps the sender's end so its first frame is dropped, or has one byte flipped
// at the given offset.
Link with_fault(Link link, Fault fault, std::size_t byte_offset = 20);

}  // namespace qtp
