#ifndef DYNABG_IMAGE_IO_HPP
#define DYNABG_IMAGE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dynabg/frame.hpp"

namespace dynabg {

// Decodes PNG/PGM/JPEG; RGB inputs are converted through to_grayscale.
// downscale > 1 box-averages downscale x downscale blocks (trailing
// remainder rows/columns are dropped).
Frame load_frame(const std::filesystem::path& file, int downscale = 1);

// Frames matching `pattern` (shell-style glob on the filename, * and ?)
// in lexicographic filename order. Throws if nothing matches, a file
// fails to decode, or dimensions are mixed; messages carry filenames.
FrameSequence load_sequence(const std::filesystem::path& directory,
                            const std::string& pattern = "*",
                            int downscale = 1);

// Extension picks the codec: .pgm is written natively (binary P5),
// anything else goes through the image library.
void save_frame(const Frame& frame, const std::filesystem::path& file);

Frame load_pgm(const std::filesystem::path& file);
void save_pgm(const Frame& frame, const std::filesystem::path& file);

bool glob_match(const std::string& pattern, const std::string& name);

}  // namespace dynabg

#endif
