#include "pipeline/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "util/error.hpp"

namespace signseg {

namespace {

const char* tag_color(BioTag t) {
  switch (t) {
    case BioTag::O: return "#e9e9e9";
    case BioTag::I: return "#5b9bd5";
    case BioTag::B: return "#1f3d7a";
  }
  return "#000000";
}

const char* category_color(SampleCategory c) {
  switch (c) {
    case SampleCategory::kMatched: return "#3a9e4d";
    case SampleCategory::kOverSegmented: return "#d64545";
    case SampleCategory::kUnderSegmented: return "#e8923a";
  }
  return "#000000";
}

}  // namespace

void render_timeline_svg(const std::filesystem::path& path,
                         const std::string& sample_id, const TagSequence& gt,
                         const TagSequence& pred, SampleCategory category) {
  const std::int64_t frames = std::max(gt.size(), pred.size());
  const double cell = frames > 600 ? 1.0 : 2.0;
  const double left = 90.0;
  const double strip_h = 22.0;
  const double gap = 8.0;
  const double top = 34.0;
  const double width = left + cell * static_cast<double>(frames) + 12.0;
  const double height = top + 2 * strip_h + gap + 30.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\" stroke=\"" << category_color(category)
      << "\" stroke-width=\"3\"/>\n";
  svg << "<text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"13\">"
      << sample_id << " [" << category_name(category) << "]</text>\n";

  auto strip = [&](const TagSequence& tags, double y, const char* label) {
    svg << "<text x=\"8\" y=\"" << y + strip_h - 6
        << "\" font-family=\"monospace\" font-size=\"11\">" << label
        << "</text>\n";
    // Merge equal-tag runs into single rects to keep files small.
    std::int64_t run_start = 0;
    for (std::int64_t t = 1; t <= tags.size(); ++t) {
      if (t == tags.size() ||
          tags.tags[static_cast<std::size_t>(t)] !=
              tags.tags[static_cast<std::size_t>(run_start)]) {
        const BioTag tag = tags.tags[static_cast<std::size_t>(run_start)];
        svg << "<rect x=\"" << left + cell * static_cast<double>(run_start)
            << "\" y=\"" << y << "\" width=\""
            << cell * static_cast<double>(t - run_start) << "\" height=\""
            << strip_h << "\" fill=\"" << tag_color(tag) << "\"/>\n";
        run_start = t;
      }
    }
  };
  strip(gt, top, "truth");
  strip(pred, top + strip_h + gap, "pred");

  const double ly = top + 2 * strip_h + gap + 18.0;
  double lx = left;
  for (BioTag t : {BioTag::O, BioTag::I, BioTag::B}) {
    svg << "<rect x=\"" << lx << "\" y=\"" << ly - 10
        << "\" width=\"12\" height=\"12\" fill=\"" << tag_color(t) << "\"/>\n";
    svg << "<text x=\"" << lx + 16 << "\" y=\"" << ly
        << "\" font-family=\"monospace\" font-size=\"11\">" << tag_char(t)
        << "</text>\n";
    lx += 52.0;
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out << svg.str();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_report_summary(const std::filesystem::path& path,
                          const EvalReport& report, int timelines_rendered) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "segmentation report\n";
  s << "===================\n";
  s << "frame_f1       " << report.frame_f1 << "\n";
  s << "iou            " << report.iou << "\n";
  s << "segment_ratio  " << report.segment_ratio << "\n";
  s << "mf1b           " << report.mf1b << "\n";
  s << "mf1s           " << report.mf1s << "\n";
  s << "micro_f1       " << report.micro_f1 << "\n";
  s << "\nper-class (precision / recall / f1)\n";
  const char* names[3] = {"O", "I", "B"};
  for (int c = 0; c < 3; ++c) {
    const PerClassScore& p = report.per_class[static_cast<std::size_t>(c)];
    s << "  " << names[c] << "  " << p.precision << " / " << p.recall << " / "
      << p.f1 << "\n";
  }
  s << "\nsamples        " << report.samples.size() << "\n";
  s << "matched        " << report.count(SampleCategory::kMatched) << "\n";
  s << "over_segmented " << report.count(SampleCategory::kOverSegmented) << "\n";
  s << "under_segmented " << report.count(SampleCategory::kUnderSegmented)
    << "\n";
  s << "timelines      " << timelines_rendered << "\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out << s.str();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace signseg
