#include "qtenc/cu.hpp"

#include <stdexcept>

namespace qtenc {

const char* to_string(PartitionMode m) {
    switch (m) {
    case PartitionMode::NONE: return "NONE";
    case PartitionMode::QT: return "QT";
    case PartitionMode::BTH: return "BTH";
    case PartitionMode::BTV: return "BTV";
    case PartitionMode::TTH: return "TTH";
    case PartitionMode::TTV: return "TTV";
    }
    return "?";
}

PartitionMode partition_mode_from_string(const std::string& s) {
    if (s == "NONE") return PartitionMode::NONE;
    if (s == "QT") return PartitionMode::QT;
    if (s == "BTH") return PartitionMode::BTH;
    if (s == "BTV") return PartitionMode::BTV;
    if (s == "TTH") return PartitionMode::TTH;
    if (s == "TTV") return PartitionMode::TTV;
    throw std::invalid_argument("unknown partition mode: " + s);
}

} // namespace qtenc
