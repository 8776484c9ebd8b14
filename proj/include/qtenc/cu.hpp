#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace qtenc {

// Split grammar of the partition tree. NONE is the no-split leaf option.
enum class PartitionMode : std::uint8_t { NONE, QT, BTH, BTV, TTH, TTV };

constexpr std::array<PartitionMode, 5> kSplitModes{
    PartitionMode::QT, PartitionMode::BTH, PartitionMode::BTV,
    PartitionMode::TTH, PartitionMode::TTV};

const char* to_string(PartitionMode m);
PartitionMode partition_mode_from_string(const std::string& s);

// A rectangular coding unit. depth counts splits from the CTU root; once a
// BT/TT split occurred on the path, QT is illegal below.
struct CuNode {
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
    int depth = 0;
    bool mtt_started = false;
};

constexpr int kMaxDepth = 6;

} // namespace qtenc
