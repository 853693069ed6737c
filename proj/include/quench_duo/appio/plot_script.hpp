#pragma once

// Standalone matplotlib scripts that read a dataset's CSV by relative path.

#include <string>

#include "quench_duo/appio/dataset.hpp"

namespace quench_duo::appio {

namespace detail {

inline std::string py_list(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t k = 0; k < items.size(); ++k) s += (k ? ", " : "") + ("\"" + items[k] + "\"");
  return s + "]";
}

}  // namespace detail

inline std::string emit_plot_script(const Dataset& ds) {
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "# Plot for " + ds.name + ".csv (written by quench-duo).\n";
  s += "from pathlib import Path\n\n";
  s += "import matplotlib.pyplot as plt\n";
  s += "import numpy as np\n\n";
  s += "HERE = Path(__file__).resolve().parent\n";
  s += "CSV = HERE / \"" + ds.name + ".csv\"\n";
  s += "# Skip the '#' metadata block; the next line holds the column names.\n";
  s += "skip = next(i for i, line in enumerate(CSV.read_text().splitlines()) if not line.startswith(\"#\"))\n";
  s += "data = np.genfromtxt(CSV, delimiter=\",\", names=True, skip_header=skip)\n";
  s += "fig, ax = plt.subplots()\n";
  const std::string x = ds.x_column.empty() ? ds.columns.front() : ds.x_column;
  const std::string y = ds.y_column.empty() ? (ds.columns.size() > 1 ? ds.columns[1] : ds.columns.front()) : ds.y_column;
  switch (ds.kind) {
    case PlotKind::line:
      s += "for name in data.dtype.names[1:]:\n";
      s += "    ax.plot(data[\"" + x + "\"], data[name], label=name)\n";
      s += "ax.set_xlabel(\"" + x + "\")\n";
      s += "if len(data.dtype.names) > 2:\n    ax.legend()\nelse:\n    ax.set_ylabel(data.dtype.names[1])\n";
      break;
    case PlotKind::series:
      s += "keys = " + detail::py_list(ds.series_columns) + "\n";
      s += "groups = sorted({tuple(row[k] for k in keys) for row in data})\n";
      s += "for group in groups:\n";
      s += "    mask = np.all([data[k] == v for k, v in zip(keys, group)], axis=0)\n";
      s += "    label = \", \".join(f\"{k}={v:g}\" for k, v in zip(keys, group))\n";
      s += "    ax.plot(data[\"" + x + "\"][mask], data[\"" + y + "\"][mask], label=label)\n";
      s += "ax.set_xlabel(\"" + x + "\")\nax.set_ylabel(\"" + y + "\")\n";
      s += "ax.legend(fontsize=\"small\", ncol=2)\n";
      break;
    case PlotKind::stem:
      s += "ax.vlines(data[\"" + x + "\"], 0, data[\"" + y + "\"])\n";
      s += "ax.set_xlabel(\"" + x + "\")\nax.set_ylabel(\"" + y + "\")\n";
      break;
    case PlotKind::heatmap:
      s += "xs = np.unique(data[\"" + x + "\"])\n";
      s += "ys = np.unique(data[\"" + y + "\"])\n";
      s += "values = " + detail::py_list(ds.series_columns) + "\n";
      s += "z = np.sqrt(sum(data[v] ** 2 for v in values)).reshape(len(xs), len(ys))\n";
      s += "mesh = ax.pcolormesh(xs, ys, z.T, shading=\"auto\")\n";
      s += "fig.colorbar(mesh, ax=ax)\n";
      s += "ax.set_aspect(\"equal\")\n";
      s += "ax.set_xlabel(\"" + x + "\")\nax.set_ylabel(\"" + y + "\")\n";
      break;
  }
  s += "ax.set_title(\"" + ds.name + "\")\n";
  s += "fig.tight_layout()\n";
  s += "fig.savefig(HERE / \"" + ds.name + ".png\", dpi=150)\n";
  return s;
}

}  // namespace quench_duo::appio
