// SPDX-License-Identifier: Apache-2.0
//
// isac-waveforms: range-Doppler simulation of ISAC candidate radar waveforms
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Mixed-radix decimation-in-time FFT for arbitrary lengths (radix 4 and 2
// butterflies, generic O(p^2) butterflies for the remaining prime factors).
//
// The twiddle table can be passed through a transform at plan time; the
// fixed-point emulation uses this to quantize the twiddle factors.

#include "isac/common.hpp"

#include <functional>
#include <span>

namespace isac
{

class Fft
{
  public:
    using TwiddleTransform = std::function<Complex(Complex)>;

    explicit Fft(std::size_t n, const TwiddleTransform &transform = {}) : n_(n)
    {
        if (n == 0)
            throw ParameterError("FFT length must be positive");
        twiddles_.resize(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const double phase = -two_pi * static_cast<double>(k) / static_cast<double>(n);
            twiddles_[k] = Complex(std::cos(phase), std::sin(phase));
            if (transform)
                twiddles_[k] = transform(twiddles_[k]);
        }
        factorize();
    }

    std::size_t size() const { return n_; }

    /// Unnormalized forward transform, X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
    void forward(std::span<const Complex> in, std::span<Complex> out) const
    {
        check(in, out);
        if (in.data() == out.data())
        {
            std::vector<Complex> copy(in.begin(), in.end());
            work(out.data(), copy.data(), 1, 1, 0);
        }
        else
        {
            work(out.data(), in.data(), 1, 1, 0);
        }
    }

    /// Normalized inverse transform (1/N), computed as conj(FFT(conj(x)))/N.
    void inverse(std::span<const Complex> in, std::span<Complex> out) const
    {
        check(in, out);
        std::vector<Complex> conj_in(n_);
        for (std::size_t i = 0; i < n_; ++i)
            conj_in[i] = std::conj(in[i]);
        work(out.data(), conj_in.data(), 1, 1, 0);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto &v : out)
            v = std::conj(v) * scale;
    }

    std::vector<Complex> forward(std::span<const Complex> in) const
    {
        std::vector<Complex> out(n_);
        forward(in, out);
        return out;
    }

    std::vector<Complex> inverse(std::span<const Complex> in) const
    {
        std::vector<Complex> out(n_);
        inverse(in, out);
        return out;
    }

  private:
    void check(std::span<const Complex> in, std::span<Complex> out) const
    {
        if (in.size() != n_ || out.size() != n_)
            throw ParameterError("FFT buffer length does not match plan length");
    }

    void factorize()
    {
        std::size_t n = n_;
        std::size_t p = 4;
        while (n > 1)
        {
            while (n % p != 0)
            {
                switch (p)
                {
                case 4: p = 2; break;
                case 2: p = 3; break;
                default: p += 2; break;
                }
                if (p * p > n)
                    p = n;
            }
            n /= p;
            radices_.push_back(p);
            spans_.push_back(n);
        }
        if (radices_.empty())
        {
            radices_.push_back(1);
            spans_.push_back(1);
        }
    }

    void work(Complex *out, const Complex *in, std::size_t fstride, std::size_t in_stride,
              std::size_t stage) const
    {
        const std::size_t p = radices_[stage];
        const std::size_t m = spans_[stage];
        if (m == 1)
        {
            for (std::size_t k = 0; k < p; ++k)
                out[k] = in[k * fstride * in_stride];
        }
        else
        {
            for (std::size_t k = 0; k < p; ++k)
                work(out + k * m, in + k * fstride * in_stride, fstride * p, in_stride, stage + 1);
        }

        switch (p)
        {
        case 1: break;
        case 2: butterfly2(out, fstride, m); break;
        case 4: butterfly4(out, fstride, m); break;
        default: butterfly_generic(out, fstride, p, m); break;
        }
    }

    void butterfly2(Complex *out, std::size_t fstride, std::size_t m) const
    {
        for (std::size_t k = 0; k < m; ++k)
        {
            const Complex t = out[k + m] * twiddles_[k * fstride];
            out[k + m] = out[k] - t;
            out[k] += t;
        }
    }

    void butterfly4(Complex *out, std::size_t fstride, std::size_t m) const
    {
        for (std::size_t k = 0; k < m; ++k)
        {
            const Complex s0 = out[k + m] * twiddles_[k * fstride];
            const Complex s1 = out[k + 2 * m] * twiddles_[2 * k * fstride];
            const Complex s2 = out[k + 3 * m] * twiddles_[3 * k * fstride];
            const Complex s5 = out[k] - s1;
            const Complex a0 = out[k] + s1;
            const Complex s3 = s0 + s2;
            const Complex s4 = s0 - s2;
            // -j * s4
            const Complex rot(s4.imag(), -s4.real());
            out[k + 2 * m] = a0 - s3;
            out[k] = a0 + s3;
            out[k + m] = s5 + rot;
            out[k + 3 * m] = s5 - rot;
        }
    }

    void butterfly_generic(Complex *out, std::size_t fstride, std::size_t p, std::size_t m) const
    {
        std::vector<Complex> scratch(p);
        for (std::size_t u = 0; u < m; ++u)
        {
            for (std::size_t q = 0; q < p; ++q)
                scratch[q] = out[u + q * m];
            for (std::size_t q1 = 0; q1 < p; ++q1)
            {
                const std::size_t k = u + q1 * m;
                Complex acc = scratch[0];
                std::size_t tw = 0;
                for (std::size_t q = 1; q < p; ++q)
                {
                    tw += fstride * k;
                    tw %= n_;
                    acc += scratch[q] * twiddles_[tw];
                }
                out[k] = acc;
            }
        }
    }

    std::size_t n_;
    std::vector<Complex> twiddles_;
    std::vector<std::size_t> radices_;
    std::vector<std::size_t> spans_;
};

} // namespace isac
