#include <gtest/gtest.h>

#include <random>

#include "resmot/wire.hpp"

using namespace resmot;
using namespace resmot::wire;

namespace {

using Bytes = std::vector<std::uint8_t>;

Message random_message(std::mt19937& rng, int dim) {
  std::uniform_int_distribution<int> kind(0, 4), small(0, 6), byte(0, 255);
  std::uniform_int_distribution<std::uint32_t> u32;
  std::uniform_real_distribution<float> f(-2000.0f, 2000.0f);
  switch (kind(rng)) {
    case 0:
    case 1: {
      FrameFull m;
      m.frame_index = u32(rng);
      m.resolution_index = static_cast<std::uint8_t>(byte(rng));
      m.width = static_cast<std::uint16_t>(u32(rng));
      m.height = static_cast<std::uint16_t>(u32(rng));
      m.data.resize(static_cast<std::size_t>(small(rng) * 7));
      for (auto& b : m.data) b = static_cast<std::uint8_t>(byte(rng));
      if (kind(rng) % 2) {
        FrameScaled s;
        s.frame_index = m.frame_index;
        s.resolution_index = m.resolution_index;
        s.width = m.width;
        s.height = m.height;
        s.data = m.data;
        return s;
      }
      return m;
    }
    case 2:
      return ResolutionDirective{u32(rng), static_cast<std::uint8_t>(byte(rng))};
    case 3: {
      DetectionResult m;
      m.frame_index = u32(rng);
      const int n = small(rng);
      for (int i = 0; i < n; ++i) {
        WireDetection d{f(rng), f(rng), f(rng), f(rng), f(rng), {}};
        for (int k = 0; k < dim; ++k) d.embedding.push_back(f(rng));
        m.detections.push_back(d);
      }
      return m;
    }
    default: {
      TrackUpdate m;
      m.frame_index = u32(rng);
      const int n = small(rng);
      for (int i = 0; i < n; ++i) m.tracks.push_back({u32(rng), f(rng), f(rng), f(rng), f(rng)});
      return m;
    }
  }
}

}  // namespace

TEST(Wire, DirectiveRoundTrip) {
  const Codec codec;
  const Message m = ResolutionDirective{40, 2};
  const auto bytes = codec.encode(m);
  EXPECT_EQ(bytes, (Bytes{0, 0, 0, 5, 3, 0, 0, 0, 40, 2}));
  EXPECT_EQ(std::get<ResolutionDirective>(codec.decode(bytes)), (ResolutionDirective{40, 2}));
}

TEST(Wire, EmptyDetectionResultSize) {
  const Codec codec;
  const auto bytes = codec.encode(DetectionResult{7, {}});
  EXPECT_EQ(bytes.size(), kHeaderSize + 6);
  EXPECT_EQ(codec.payload_size(DetectionResult{7, {}}), 6u);
}

TEST(Wire, RecordSizes) {
  const Codec codec(4);
  DetectionResult m{1, {WireDetection{1, 2, 3, 4, 0.5f, {1, 2, 3, 4}}}};
  EXPECT_EQ(codec.payload_size(m), 6u + 20u + 16u);
  TrackUpdate t{1, {{1, 1, 2, 3, 4}, {2, 5, 6, 7, 8}}};
  EXPECT_EQ(codec.payload_size(t), 6u + 40u);
  EXPECT_EQ(codec.encode(t).size(), kHeaderSize + 46u);
}

TEST(Wire, EmbeddingLengthEnforced) {
  const Codec codec(4);
  DetectionResult m{1, {WireDetection{1, 2, 3, 4, 0.5f, {1, 2, 3}}}};
  EXPECT_THROW(codec.encode(m), Error);
}

TEST(Wire, DecodeErrorsNameOffsets) {
  const Codec codec;
  auto bytes = codec.encode(ResolutionDirective{40, 2});
  try {
    codec.decode(Bytes(bytes.begin(), bytes.begin() + 3));
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.module(), "wire");
  }
  bytes[4] = 9;
  try {
    codec.decode(bytes);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos);
  }
  auto longer = codec.encode(ResolutionDirective{40, 2});
  longer.push_back(0);
  EXPECT_THROW(codec.decode(longer), DecodeError);
}

TEST(Wire, FuzzRoundTripAndMutations) {
  std::mt19937 rng(2024);
  const int dim = 8;
  const Codec codec(dim);
  std::uniform_int_distribution<int> mutation(0, 3);
  int errors = 0, changed = 0;
  for (int t = 0; t < 10000; ++t) {
    const Message m = random_message(rng, dim);
    const Bytes bytes = codec.encode(m);
    ASSERT_EQ(bytes.size(), kHeaderSize + codec.payload_size(m));
    const Message back = codec.decode(bytes);
    ASSERT_EQ(back.index(), m.index());
    ASSERT_EQ(codec.encode(back), bytes);  // bit-exact, NaN payloads included

    Bytes bad = bytes;
    std::uniform_int_distribution<std::size_t> pos(0, bad.size() - 1);
    switch (mutation(rng)) {
      case 0:
        bad[pos(rng)] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        break;
      case 1:
        bad.resize(pos(rng));
        break;
      case 2:
        bad.push_back(static_cast<std::uint8_t>(rng()));
        break;
      default:
        bad[pos(rng)] = static_cast<std::uint8_t>(bad[pos(rng)] + 1 + rng() % 255);
        break;
    }
    if (bad == bytes) continue;
    try {
      const Message got = codec.decode(bad);
      // accepted input must re-encode to exactly the bytes received
      ASSERT_EQ(codec.encode(got), bad) << "silent corruption at trial " << t;
      ++changed;
    } catch (const DecodeError&) {
      ++errors;
    }
  }
  EXPECT_GT(errors, 0);
  EXPECT_GT(changed, 0);
}

TEST(Wire, StreamReaderReassemblesChunks) {
  std::mt19937 rng(5);
  const Codec codec(4);
  std::vector<Message> msgs;
  Bytes stream;
  for (int i = 0; i < 50; ++i) {
    msgs.push_back(random_message(rng, 4));
    const auto b = codec.encode(msgs.back());
    stream.insert(stream.end(), b.begin(), b.end());
  }
  StreamReader reader(codec);
  std::vector<Message> got;
  std::size_t at = 0;
  while (at < stream.size()) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 17, stream.size() - at);
    reader.feed(std::span(stream).subspan(at, n));
    at += n;
    while (auto m = reader.next()) got.push_back(std::move(*m));
  }
  ASSERT_EQ(got.size(), msgs.size());
  for (std::size_t i = 0; i < msgs.size(); ++i) EXPECT_EQ(codec.encode(got[i]), codec.encode(msgs[i]));
  EXPECT_EQ(reader.buffered(), 0u);
}

TEST(Wire, StreamReaderRejectsOversizedFrame) {
  const Codec codec;
  StreamReader reader(codec);
  const Bytes huge{0xff, 0xff, 0xff, 0xff, 1};
  reader.feed(huge);
  EXPECT_THROW(reader.next(), DecodeError);
}

TEST(Wire, DetectionConversion) {
  const Detection d{{10.5, 20.25, 8, 16}, 0.75, {0.5f, -0.5f}};
  const auto back = from_wire(to_wire(d));
  EXPECT_EQ(back.box, d.box);
  EXPECT_DOUBLE_EQ(back.score, d.score);
  EXPECT_EQ(back.embedding, d.embedding);
}
