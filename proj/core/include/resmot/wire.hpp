#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "resmot/types.hpp"

namespace resmot::wire {

// Framing: u32 big-endian payload length, u8 message type, payload.
inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::uint32_t kMaxPayload = 64u << 20;

enum class MessageType : std::uint8_t {
  FrameFull = 1,
  FrameScaled = 2,
  ResolutionDirective = 3,
  DetectionResult = 4,
  TrackUpdate = 5,
};

const char* to_string(MessageType t);

/// Camera -> server frame upload. `data` stands in for the encoded image.
template <MessageType Kind>
struct FramePayload {
  static constexpr MessageType kType = Kind;
  std::uint32_t frame_index = 0;
  std::uint8_t resolution_index = 0;
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::vector<std::uint8_t> data;

  bool operator==(const FramePayload&) const = default;
};

using FrameFull = FramePayload<MessageType::FrameFull>;
using FrameScaled = FramePayload<MessageType::FrameScaled>;

/// Frame descriptor bytes preceding the image data in a frame payload.
inline constexpr std::size_t kFrameDescriptorSize = 9;

struct ResolutionDirective {
  static constexpr MessageType kType = MessageType::ResolutionDirective;
  std::uint32_t frame_index = 0;
  std::uint8_t resolution_index = 0;

  bool operator==(const ResolutionDirective&) const = default;
};

struct WireDetection {
  float cx = 0, cy = 0, w = 0, h = 0;
  float score = 0;
  std::vector<float> embedding;
};

struct DetectionResult {
  static constexpr MessageType kType = MessageType::DetectionResult;
  std::uint32_t frame_index = 0;
  std::vector<WireDetection> detections;
};

struct WireTrack {
  std::uint32_t track_id = 0;
  float cx = 0, cy = 0, w = 0, h = 0;
};

struct TrackUpdate {
  static constexpr MessageType kType = MessageType::TrackUpdate;
  std::uint32_t frame_index = 0;
  std::vector<WireTrack> tracks;
};

using Message = std::variant<FrameFull, FrameScaled, ResolutionDirective, DetectionResult, TrackUpdate>;

MessageType type_of(const Message& m);

/// Raised on malformed input; `offset()` is the byte position of the fault.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error("wire", what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Encoder/decoder for one run. The embedding length is a run-level
/// constant and is not carried on the wire.
class Codec {
 public:
  explicit Codec(int embedding_dim = kDefaultEmbeddingDim);

  int embedding_dim() const { return embedding_dim_; }

  std::vector<std::uint8_t> encode(const Message& m) const;

  /// Decodes exactly one message occupying all of `bytes`.
  Message decode(std::span<const std::uint8_t> bytes) const;

  std::size_t payload_size(const Message& m) const;
  std::size_t detection_record_size() const { return 20 + 4 * static_cast<std::size_t>(embedding_dim_); }

 private:
  int embedding_dim_;
};

/// Reassembles messages from an arbitrarily chunked byte stream.
class StreamReader {
 public:
  explicit StreamReader(const Codec& codec) : codec_(&codec) {}

  void feed(std::span<const std::uint8_t> bytes);

  /// Next complete message, if buffered. Throws DecodeError on a bad frame.
  std::optional<Message> next();

  std::size_t buffered() const { return buffer_.size(); }

 private:
  const Codec* codec_;
  std::vector<std::uint8_t> buffer_;
};

// Conversions between pipeline and wire records.
WireDetection to_wire(const Detection& d);
Detection from_wire(const WireDetection& d);

}  // namespace resmot::wire
