#ifndef MENUFORGE_PLOT_HPP
#define MENUFORGE_PLOT_HPP

#include <string>

#include "menuforge/geometry.hpp"

namespace menuforge {

// Renders a two-outcome instance and menu as a standalone SVG. The x axis is
// the probability of the second outcome; the chart shows each contract as a
// line, their upper envelope, the lower hull of the action cost points
// (dashed), and tick marks at the beliefs the menu designates. A trailing
// comment carries the plotted values in data coordinates so tests and tools
// can read the chart back without touching pixels. Output is deterministic
// for a given instance and menu.
//
// Throws PreconditionError when the instance has more than two outcomes or
// the menu is empty, and DimensionError when menu and instance disagree on
// the outcome count.
std::string render_plot_svg(const ProblemInstance& inst, const Menu& menu);

}  // namespace menuforge

#endif
