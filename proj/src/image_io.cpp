#include "dynabg/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace dynabg {

namespace {

std::string lower_ext(const std::filesystem::path& file) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

Frame downscale_frame(const Frame& in, int factor) {
  const int w = in.width / factor;
  const int h = in.height / factor;
  if (w < 1 || h < 1) {
    throw std::invalid_argument("downscale factor " + std::to_string(factor) +
                                " leaves no pixels");
  }
  Frame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) {
          sum += in.at(x * factor + dx, y * factor + dy);
        }
      }
      out.at(x, y) = clamp_to_byte(static_cast<double>(sum) / (factor * factor));
    }
  }
  return out;
}

Frame decode_with_opencv(const std::filesystem::path& file) {
  cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) {
    throw std::runtime_error("cannot decode image: " + file.string());
  }
  if (img.depth() != CV_8U) {
    throw std::runtime_error("not an 8-bit image: " + file.string());
  }
  Frame frame(img.cols, img.rows);
  if (img.channels() == 1) {
    for (int y = 0; y < img.rows; ++y) {
      const std::uint8_t* row = img.ptr<std::uint8_t>(y);
      std::copy(row, row + img.cols, frame.data.begin() + static_cast<std::size_t>(y) * img.cols);
    }
  } else if (img.channels() == 3 || img.channels() == 4) {
    // OpenCV decodes as BGR(A)
    for (int y = 0; y < img.rows; ++y) {
      const std::uint8_t* row = img.ptr<std::uint8_t>(y);
      for (int x = 0; x < img.cols; ++x) {
        const std::uint8_t* px = row + static_cast<std::size_t>(x) * img.channels();
        frame.at(x, y) = to_grayscale(px[2], px[1], px[0]);
      }
    }
  } else {
    throw std::runtime_error("unsupported channel count " +
                             std::to_string(img.channels()) + ": " + file.string());
  }
  return frame;
}

int read_pgm_token(std::istream& in, const std::string& file) {
  // skips whitespace and '#' comment lines
  for (;;) {
    int c = in.peek();
    if (c == EOF) throw std::runtime_error("truncated PGM header: " + file);
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw std::runtime_error("bad PGM header: " + file);
  return value;
}

}  // namespace

Frame load_pgm(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + file.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') {
    throw std::runtime_error("not a binary PGM (P5): " + file.string());
  }
  const int width = read_pgm_token(in, file.string());
  const int height = read_pgm_token(in, file.string());
  const int maxval = read_pgm_token(in, file.string());
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw std::runtime_error("unsupported PGM geometry in " + file.string());
  }
  in.get();  // single separator after maxval
  Frame frame(width, height);
  in.read(reinterpret_cast<char*>(frame.data.data()),
          static_cast<std::streamsize>(frame.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(frame.data.size())) {
    throw std::runtime_error("truncated PGM data: " + file.string());
  }
  return frame;
}

void save_pgm(const Frame& frame, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + file.string());
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data.data()),
            static_cast<std::streamsize>(frame.data.size()));
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

Frame load_frame(const std::filesystem::path& file, int downscale) {
  if (downscale < 1) {
    throw std::invalid_argument("downscale must be >= 1");
  }
  Frame frame = lower_ext(file) == ".pgm" ? load_pgm(file) : decode_with_opencv(file);
  return downscale > 1 ? downscale_frame(frame, downscale) : frame;
}

void save_frame(const Frame& frame, const std::filesystem::path& file) {
  if (lower_ext(file) == ".pgm") {
    save_pgm(frame, file);
    return;
  }
  cv::Mat img(frame.height, frame.width, CV_8UC1);
  for (int y = 0; y < frame.height; ++y) {
    std::copy(frame.data.begin() + static_cast<std::size_t>(y) * frame.width,
              frame.data.begin() + static_cast<std::size_t>(y + 1) * frame.width,
              img.ptr<std::uint8_t>(y));
  }
  if (!cv::imwrite(file.string(), img)) {
    throw std::runtime_error("cannot encode: " + file.string());
  }
}

bool glob_match(const std::string& pattern, const std::string& name) {
  // iterative * backtracking; only * and ? are special
  std::size_t p = 0, n = 0;
  std::size_t star = std::string::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
      ++p;
      ++n;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (star != std::string::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

FrameSequence load_sequence(const std::filesystem::path& directory,
                            const std::string& pattern, int downscale) {
  if (!std::filesystem::is_directory(directory)) {
    throw std::runtime_error("not a directory: " + directory.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    if (glob_match(pattern, entry.path().filename().string())) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw std::runtime_error("no frames: nothing in " + directory.string() +
                             " matches '" + pattern + "'");
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

  FrameSequence seq;
  seq.frames.reserve(files.size());
  for (const auto& file : files) {
    Frame f = load_frame(file, downscale);
    if (!seq.frames.empty() &&
        (f.width != seq.width() || f.height != seq.height())) {
      std::ostringstream msg;
      msg << "dimension mismatch: " << file.filename().string() << " is "
          << f.width << "x" << f.height << " but " << files.front().filename().string()
          << " is " << seq.width() << "x" << seq.height();
      throw std::runtime_error(msg.str());
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

}  // namespace dynabg
