#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>

#include "grid.hpp"

namespace csrecon {

// Unitary 2D DFT backed by FFTW.  Both directions scale by 1/n, so
// forward/inverse are exact adjoints of each other and Parseval holds
// without bookkeeping.  Plans use FFTW_ESTIMATE (deterministic, no
// measurement noise) and FFTW_UNALIGNED so one cached plan per size can
// run on any buffer.
class Fft {
public:
  static void forward(const ImageGrid& in, ImageGrid& out) { run(in, out, FFTW_FORWARD); }
  static void inverse(const ImageGrid& in, ImageGrid& out) { run(in, out, FFTW_BACKWARD); }

  static ImageGrid forward(const ImageGrid& in) {
    ImageGrid out(in.n());
    forward(in, out);
    return out;
  }
  static ImageGrid inverse(const ImageGrid& in) {
    ImageGrid out(in.n());
    inverse(in, out);
    return out;
  }

private:
  static void run(const ImageGrid& in, ImageGrid& out, int sign) {
    const int n = in.n();
    if (out.n() != n) out = ImageGrid(n);
    fftw_plan p = plan(n, sign);
    // fftw_execute_dft does not touch the input for out-of-place c2c plans,
    // so the const_cast is safe.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / n;
    out *= s;
  }

  static fftw_plan plan(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> a(size_t(n) * n), b(size_t(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
  }
};

}  // namespace csrecon
