// Trajan apple micropropagation data: number of roots per shoot, 270 shoots,
// photoperiod (8 or 16 hours) x BAP concentration (2.2, 4.4, 8.8, 17.6 uM).
// Stored as the published frequency table; see data/README.md for provenance.
#include <array>
#include <string>

#include "zinf/dataset.hpp"

namespace zinf {
namespace {

struct TrajanCell {
  const char* photoperiod;
  const char* bap;
};

constexpr std::array<TrajanCell, 8> kCells{{{"8", "2.2"},
                                            {"8", "4.4"},
                                            {"8", "8.8"},
                                            {"8", "17.6"},
                                            {"16", "2.2"},
                                            {"16", "4.4"},
                                            {"16", "8.8"},
                                            {"16", "17.6"}}};

// Row r holds the number of shoots with r roots in each cell.
constexpr int kMaxRoots = 17;
constexpr std::array<std::array<int, 8>, kMaxRoots + 1> kFrequencies{{
    {0, 0, 0, 2, 15, 16, 12, 19},  // 0
    {3, 0, 0, 0, 0, 2, 3, 2},      // 1
    {2, 3, 1, 0, 2, 1, 2, 2},      // 2
    {3, 0, 2, 2, 2, 1, 1, 4},      // 3
    {6, 1, 4, 2, 1, 2, 2, 3},      // 4
    {3, 0, 4, 5, 2, 1, 2, 1},      // 5
    {2, 3, 4, 5, 1, 2, 3, 4},      // 6
    {2, 7, 4, 4, 0, 0, 1, 2},      // 7
    {3, 3, 7, 8, 1, 1, 0, 0},      // 8
    {1, 5, 5, 3, 3, 0, 2, 2},      // 9
    {2, 3, 4, 4, 1, 3, 0, 0},      // 10
    {1, 4, 1, 4, 1, 0, 1, 0},      // 11
    {0, 0, 2, 0, 0, 1, 1, 0},      // 12
    {1, 1, 1, 0, 1, 0, 0, 0},      // 13
    {0, 0, 1, 1, 0, 0, 0, 0},      // 14
    {0, 0, 0, 0, 0, 0, 0, 0},      // 15
    {1, 0, 0, 0, 0, 0, 0, 0},      // 16
    {0, 0, 0, 0, 0, 0, 0, 1},      // 17
}};

}  // namespace

std::string trajan_csv() {
  std::string out = "photoperiod,bap,roots\n";
  for (std::size_t c = 0; c < kCells.size(); ++c)
    for (int r = 0; r <= kMaxRoots; ++r)
      for (int k = 0; k < kFrequencies[static_cast<std::size_t>(r)][c]; ++k)
        out += std::string(kCells[c].photoperiod) + "," + kCells[c].bap + "," + std::to_string(r) + "\n";
  return out;
}

CountDataset trajan_dataset() {
  CsvSchema schema;
  schema.response = "roots";
  schema.factors = {"photoperiod", "bap"};
  schema.cell = std::string(kTrajanCell);
  return parse_csv(trajan_csv(), schema);
}

}  // namespace zinf
