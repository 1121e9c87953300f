#include "spdc/phase_map.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

int GridSpec::half_count() const { return static_cast<int>(std::lround(half_extent_deg / step_deg)); }

void GridSpec::validate() const {
  if (!(step_deg > 0.0)) throw InputError("grid step must be positive");
  if (!(half_extent_deg >= step_deg)) throw InputError("grid extent must be at least one step");
  if (half_extent_deg > 5.0 + 1e-12) throw InputError("grid extent exceeds the 5 degree model window");
}

PhaseMap::PhaseMap(GridSpec grid, std::vector<double> values, PhaseMapMetadata metadata)
    : grid_(grid), side_(grid.side()), values_(std::move(values)), metadata_(std::move(metadata)) {
  if (values_.size() != static_cast<std::size_t>(side_) * side_)
    throw InputError("phase map value count does not match the grid");
}

double PhaseMap::angle_deg(int index) const { return (index - side_ / 2) * grid_.step_deg; }

bool PhaseMap::covers(double ax_deg, double ay_deg) const {
  const double e = grid_.extent_deg() * (1.0 + 1e-12);
  return std::abs(ax_deg) <= e && std::abs(ay_deg) <= e;
}

double PhaseMap::sample(double ax_deg, double ay_deg) const {
  if (!covers(ax_deg, ay_deg)) {
    std::ostringstream os;
    os << "angle (" << ax_deg << ", " << ay_deg << ") deg outside phase map extent " << grid_.extent_deg()
       << " deg";
    throw DomainError(os.str());
  }
  const double fx = ax_deg / grid_.step_deg + side_ / 2;
  const double fy = ay_deg / grid_.step_deg + side_ / 2;
  int ix = std::min(static_cast<int>(std::floor(fx)), side_ - 2);
  int iy = std::min(static_cast<int>(std::floor(fy)), side_ - 2);
  ix = std::max(ix, 0);
  iy = std::max(iy, 0);
  const double tx = fx - ix;
  const double ty = fy - iy;
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) + (1 - tx) * ty * at(ix, iy + 1) +
         tx * ty * at(ix + 1, iy + 1);
}

void check_continuity(const PhaseMap& map) {
  const int n = map.side();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double v = map.at(ix, iy);
      const bool right = ix + 1 < n && std::abs(map.at(ix + 1, iy) - v) >= kPi;
      const bool up = iy + 1 < n && std::abs(map.at(ix, iy + 1) - v) >= kPi;
      if (right || up) {
        std::ostringstream os;
        os << "grid too coarse: phase jumps by >= pi next to (" << map.angle_deg(ix) << ", " << map.angle_deg(iy)
           << ") deg; reduce the step below " << map.grid().step_deg << " deg";
        throw DiagnosticError(os.str());
      }
    }
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

std::vector<double> unwrap_flood_fill(const std::vector<double>& wrapped, int side) {
  if (side <= 0 || wrapped.size() != static_cast<std::size_t>(side) * side)
    throw InputError("unwrap: grid size mismatch");
  std::vector<double> out(wrapped.size());
  std::vector<char> seen(wrapped.size(), 0);
  const int c = side / 2;
  const auto idx = [side](int x, int y) { return static_cast<std::size_t>(y) * side + x; };
  std::queue<std::pair<int, int>> q;
  out[idx(c, c)] = wrapped[idx(c, c)];
  seen[idx(c, c)] = 1;
  q.emplace(c, c);
  constexpr int dx[] = {1, -1, 0, 0};
  constexpr int dy[] = {0, 0, 1, -1};
  while (!q.empty()) {
    const auto [x, y] = q.front();
    q.pop();
    const double base = out[idx(x, y)];
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k];
      const int ny = y + dy[k];
      if (nx < 0 || ny < 0 || nx >= side || ny >= side || seen[idx(nx, ny)]) continue;
      out[idx(nx, ny)] = base + wrap_phase(wrapped[idx(nx, ny)] - base);
      seen[idx(nx, ny)] = 1;
      q.emplace(nx, ny);
    }
  }
  return out;
}

}  // namespace spdc
