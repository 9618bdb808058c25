#include "resmot/wire.hpp"

#include <bit>
#include <cstring>

namespace resmot::wire {

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, std::size_t base) : in_(in), base_(base) {}

  std::uint8_t u8() {
    need(1, "u8");
    return in_[pos_++];
  }
  std::uint16_t u16() {
    need(2, "u16");
    const std::uint16_t v = static_cast<std::uint16_t>((in_[pos_] << 8) | in_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4, "u32");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_ + i];
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::vector<std::uint8_t> rest() {
    std::vector<std::uint8_t> out(in_.begin() + static_cast<long>(pos_), in_.end());
    pos_ = in_.size();
    return out;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t offset() const { return base_ + pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) throw DecodeError(offset(), std::string("truncated ") + what);
  }

  std::span<const std::uint8_t> in_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

template <typename F>
void encode_frame(Writer& w, const F& f) {
  w.u32(f.frame_index);
  w.u8(f.resolution_index);
  w.u16(f.width);
  w.u16(f.height);
  w.bytes(f.data);
}

template <typename F>
F decode_frame(Reader& r) {
  F f;
  f.frame_index = r.u32();
  f.resolution_index = r.u8();
  f.width = r.u16();
  f.height = r.u16();
  f.data = r.rest();
  return f;
}

std::uint16_t checked_count(std::size_t n) {
  if (n > 0xffff) throw Error("wire", "too many records for one message");
  return static_cast<std::uint16_t>(n);
}

}  // namespace

const char* to_string(MessageType t) {
  switch (t) {
    case MessageType::FrameFull:
      return "FRAME_FULL";
    case MessageType::FrameScaled:
      return "FRAME_SCALED";
    case MessageType::ResolutionDirective:
      return "RESOLUTION_DIRECTIVE";
    case MessageType::DetectionResult:
      return "DETECTION_RESULT";
    case MessageType::TrackUpdate:
      return "TRACK_UPDATE";
  }
  return "?";
}

MessageType type_of(const Message& m) {
  return std::visit([](const auto& v) { return std::decay_t<decltype(v)>::kType; }, m);
}

Codec::Codec(int embedding_dim) : embedding_dim_(embedding_dim) {
  if (embedding_dim < 0) throw Error("wire", "negative embedding length");
}

std::size_t Codec::payload_size(const Message& m) const {
  return std::visit(
      [&](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ResolutionDirective>) {
          return 5;
        } else if constexpr (std::is_same_v<T, DetectionResult>) {
          return 6 + v.detections.size() * detection_record_size();
        } else if constexpr (std::is_same_v<T, TrackUpdate>) {
          return 6 + v.tracks.size() * 20;
        } else {
          return kFrameDescriptorSize + v.data.size();
        }
      },
      m);
}

std::vector<std::uint8_t> Codec::encode(const Message& m) const {
  const std::size_t payload = payload_size(m);
  if (payload > kMaxPayload) throw Error("wire", "payload exceeds maximum message size");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + payload);
  Writer w(out);
  w.u32(static_cast<std::uint32_t>(payload));
  w.u8(static_cast<std::uint8_t>(type_of(m)));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ResolutionDirective>) {
          w.u32(v.frame_index);
          w.u8(v.resolution_index);
        } else if constexpr (std::is_same_v<T, DetectionResult>) {
          w.u32(v.frame_index);
          w.u16(checked_count(v.detections.size()));
          for (const auto& d : v.detections) {
            if (d.embedding.size() != static_cast<std::size_t>(embedding_dim_)) {
              throw Error("wire", "embedding length " + std::to_string(d.embedding.size()) +
                                      " does not match codec length " +
                                      std::to_string(embedding_dim_));
            }
            w.f32(d.cx);
            w.f32(d.cy);
            w.f32(d.w);
            w.f32(d.h);
            w.f32(d.score);
            for (float e : d.embedding) w.f32(e);
          }
        } else if constexpr (std::is_same_v<T, TrackUpdate>) {
          w.u32(v.frame_index);
          w.u16(checked_count(v.tracks.size()));
          for (const auto& t : v.tracks) {
            w.u32(t.track_id);
            w.f32(t.cx);
            w.f32(t.cy);
            w.f32(t.w);
            w.f32(t.h);
          }
        } else {
          encode_frame(w, v);
        }
      },
      m);
  return out;
}

Message Codec::decode(std::span<const std::uint8_t> bytes) const {
  Reader header(bytes.first(std::min(bytes.size(), kHeaderSize)), 0);
  const std::uint32_t length = header.u32();
  const std::uint8_t type = header.u8();
  if (length > kMaxPayload) throw DecodeError(0, "payload length exceeds maximum");
  if (bytes.size() < kHeaderSize + length) throw DecodeError(bytes.size(), "truncated payload");
  if (bytes.size() > kHeaderSize + length) {
    throw DecodeError(kHeaderSize + length, "trailing bytes after payload");
  }
  Reader r(bytes.subspan(kHeaderSize), kHeaderSize);

  Message m;
  switch (static_cast<MessageType>(type)) {
    case MessageType::FrameFull:
      m = decode_frame<FrameFull>(r);
      break;
    case MessageType::FrameScaled:
      m = decode_frame<FrameScaled>(r);
      break;
    case MessageType::ResolutionDirective: {
      ResolutionDirective d;
      d.frame_index = r.u32();
      d.resolution_index = r.u8();
      m = d;
      break;
    }
    case MessageType::DetectionResult: {
      DetectionResult d;
      d.frame_index = r.u32();
      const std::size_t count_at = r.offset();
      const std::uint16_t count = r.u16();
      if (r.remaining() != count * detection_record_size()) {
        throw DecodeError(count_at, "detection count " + std::to_string(count) +
                                        " inconsistent with payload length");
      }
      d.detections.resize(count);
      for (auto& det : d.detections) {
        det.cx = r.f32();
        det.cy = r.f32();
        det.w = r.f32();
        det.h = r.f32();
        det.score = r.f32();
        det.embedding.resize(static_cast<std::size_t>(embedding_dim_));
        for (float& e : det.embedding) e = r.f32();
      }
      m = std::move(d);
      break;
    }
    case MessageType::TrackUpdate: {
      TrackUpdate t;
      t.frame_index = r.u32();
      const std::size_t count_at = r.offset();
      const std::uint16_t count = r.u16();
      if (r.remaining() != count * 20u) {
        throw DecodeError(count_at, "track count " + std::to_string(count) +
                                        " inconsistent with payload length");
      }
      t.tracks.resize(count);
      for (auto& tr : t.tracks) {
        tr.track_id = r.u32();
        tr.cx = r.f32();
        tr.cy = r.f32();
        tr.w = r.f32();
        tr.h = r.f32();
      }
      m = std::move(t);
      break;
    }
    default:
      throw DecodeError(4, "unknown message type " + std::to_string(type));
  }
  if (r.remaining() != 0) throw DecodeError(r.offset(), "unconsumed payload bytes");
  return m;
}

void StreamReader::feed(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> StreamReader::next() {
  if (buffer_.size() < kHeaderSize) return std::nullopt;
  const std::uint32_t length = (std::uint32_t{buffer_[0]} << 24) | (std::uint32_t{buffer_[1]} << 16) |
                               (std::uint32_t{buffer_[2]} << 8) | std::uint32_t{buffer_[3]};
  if (length > kMaxPayload) throw DecodeError(0, "payload length exceeds maximum");
  const std::size_t total = kHeaderSize + length;
  if (buffer_.size() < total) return std::nullopt;
  Message m = codec_->decode(std::span(buffer_).first(total));
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<long>(total));
  return m;
}

WireDetection to_wire(const Detection& d) {
  WireDetection w;
  w.cx = static_cast<float>(d.box.cx);
  w.cy = static_cast<float>(d.box.cy);
  w.w = static_cast<float>(d.box.w);
  w.h = static_cast<float>(d.box.h);
  w.score = static_cast<float>(d.score);
  w.embedding = d.embedding;
  return w;
}

Detection from_wire(const WireDetection& w) {
  return {{w.cx, w.cy, w.w, w.h}, w.score, w.embedding};
}

}  // namespace resmot::wire
