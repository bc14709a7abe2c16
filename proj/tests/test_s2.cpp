#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "ffcdnn/rng.hpp"
#include "ffcdnn/s2/band_simulation.hpp"
#include "ffcdnn/s2/raster.hpp"
#include "ffcdnn/s2/series_io.hpp"

using namespace ffcdnn;
using namespace ffcdnn::s2;

namespace {

std::string tmp_file(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("ffcdnn_s2_" + name);
    std::ofstream(path) << body;
    return path.string();
}

HyperSpectrum flat(double r) {
    std::vector<double> wl, v;
    for (double w = 400; w <= 1000; w += 5) {
        wl.push_back(w);
        v.push_back(r);
    }
    return {wl, v};
}

RSRCurve gaussian(double centre, double sigma, double step) {
    std::vector<double> wl, r;
    for (double w = centre - 4 * sigma; w <= centre + 4 * sigma + 1e-9; w += step) {
        wl.push_back(w);
        r.push_back(std::exp(-0.5 * (w - centre) * (w - centre) / (sigma * sigma)));
    }
    return {Band::B5, wl, r};
}

double lerp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (x <= xs[i]) return ys[i - 1] + (ys[i] - ys[i - 1]) * (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys.back();
}

} // namespace

TEST(SimulateBand, ConstantReflectanceIsReturned) {
    for (double r : {0.0, 0.05, 0.7, 1.5}) EXPECT_NEAR(simulate_band(flat(r), gaussian(700, 10, 1)), r, 1e-14);
}

TEST(SimulateBand, NarrowResponsePicksLocalValue) {
    // Response nonzero on one interval around 650 nm.
    RSRCurve rsr(Band::B4, {649.5, 650.0, 650.5}, {0.0, 1.0, 0.0});
    std::vector<double> wl, v;
    for (double w = 400; w <= 1000; w += 1) {
        wl.push_back(w);
        v.push_back(0.1 + 0.0004 * (w - 400));
    }
    EXPECT_NEAR(simulate_band(HyperSpectrum(wl, v), rsr), 0.1 + 0.0004 * 250, 1e-9);
}

TEST(SimulateBand, GaussianTimesRampMatchesFineGridQuadrature) {
    const auto rsr = gaussian(705, 6, 1.0);
    std::vector<double> wl, v;
    for (double w = 400; w <= 1000; w += 1.4) {
        wl.push_back(w);
        v.push_back(0.02 + 0.0008 * (w - 400) + 0.01 * std::sin(w / 7.0));
    }
    const HyperSpectrum spec(wl, v);
    // Oracle: 700x finer uniform grid, both curves linearly interpolated.
    const std::vector<double> rw(rsr.wavelengths().begin(), rsr.wavelengths().end());
    const std::vector<double> rr(rsr.response().begin(), rsr.response().end());
    const double lo = rw.front(), hi = rw.back();
    const std::size_t m = static_cast<std::size_t>((hi - lo) / 0.002);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double a = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m);
        const double b = lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(m);
        const double ra = lerp(rw, rr, a), rb = lerp(rw, rr, b);
        num += 0.5 * (b - a) * (ra * lerp(wl, v, a) + rb * lerp(wl, v, b));
        den += 0.5 * (b - a) * (ra + rb);
    }
    const double got = simulate_band(spec, rsr);
    EXPECT_NEAR(got, num / den, 1e-7 * std::abs(num / den));
}

TEST(SimulateBand, MonotoneAndScaleInvariant) {
    Rng rng(2);
    std::vector<double> wl, a, b;
    for (double w = 400; w <= 1000; w += 2) {
        wl.push_back(w);
        a.push_back(rng.uniform(0.0, 0.7));
        b.push_back(a.back() + rng.uniform(0.0, 0.3));
    }
    const auto rsr = gaussian(560, 12, 1.0);
    EXPECT_LE(simulate_band(HyperSpectrum(wl, a), rsr), simulate_band(HyperSpectrum(wl, b), rsr));
    std::vector<double> half(rsr.response().begin(), rsr.response().end());
    for (auto& r : half) r *= 0.37;
    const RSRCurve scaled(rsr.band(), {rsr.wavelengths().begin(), rsr.wavelengths().end()}, half);
    EXPECT_NEAR(simulate_band(HyperSpectrum(wl, a), rsr), simulate_band(HyperSpectrum(wl, a), scaled), 1e-14);
}

TEST(SimulateBand, ResultWithinBandRange) {
    Rng rng(4);
    std::vector<double> wl, v;
    for (double w = 400; w <= 1000; w += 3) {
        wl.push_back(w);
        v.push_back(rng.uniform(0.0, 1.0));
    }
    const auto rsr = gaussian(800, 20, 2.0);
    double lo = 2, hi = -1;
    for (std::size_t i = 0; i < wl.size(); ++i)
        if (wl[i] >= rsr.start() - 3 && wl[i] <= rsr.end() + 3) {
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
    const double r = simulate_band(HyperSpectrum(wl, v), rsr);
    EXPECT_GE(r, lo);
    EXPECT_LE(r, hi);
}

TEST(SimulateBand, Errors) {
    std::vector<double> wl{400, 500, 600}, v{0.1, 0.1, 0.1};
    EXPECT_THROW(simulate_band(HyperSpectrum(wl, v), gaussian(700, 10, 1)), CoverageError);
    RSRCurve zero(Band::B3, {450, 500, 550}, {0.0, 0.0, 0.0});
    EXPECT_THROW(simulate_band(HyperSpectrum(wl, v), zero), DegenerateError);
    EXPECT_THROW(HyperSpectrum({390, 500}, {0.1, 0.1}), InvalidArgument);
    EXPECT_THROW(HyperSpectrum({500, 500}, {0.1, 0.1}), InvalidArgument);
    EXPECT_THROW(HyperSpectrum({500, 600}, {0.1, 1.6}), InvalidArgument);
    EXPECT_THROW(RSRCurve(Band::B2, {500, 510}, {0.5, 1.2}), InvalidArgument);
}

TEST(Resample, ConstantRasterStaysConstant) {
    const Raster in(3, 2, std::vector<double>(6, 0.25));
    const auto out = resample_nearest(in);
    EXPECT_EQ(out.rows, 6u);
    EXPECT_EQ(out.cols, 4u);
    for (double v : out.values) EXPECT_EQ(v, 0.25);
}

TEST(Resample, TwoByTwoBlocks) {
    const auto out = resample_nearest(Raster(2, 2, {1, 2, 3, 4}));
    const std::vector<double> expect{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
    EXPECT_EQ(out.values, expect);
}

TEST(Resample, MatchesIndexOracleAndKeepsValueSet) {
    Rng rng(6);
    std::vector<double> v(35);
    for (auto& x : v) x = rng.normal();
    const Raster in(5, 7, v);
    const auto out = resample_nearest(in, 2);
    ASSERT_EQ(out.rows, 10u);
    ASSERT_EQ(out.cols, 14u);
    for (std::size_t i = 0; i < out.rows; ++i)
        for (std::size_t j = 0; j < out.cols; ++j) EXPECT_EQ(out.at(i, j), in.at(i / 2, j / 2));
    EXPECT_EQ(std::set<double>(out.values.begin(), out.values.end()), std::set<double>(v.begin(), v.end()));
    EXPECT_THROW(resample_nearest(Raster{}), InvalidArgument);
}

TEST(LoadSeries, HeaderOnlyIsEmpty) {
    EXPECT_TRUE(load_series(tmp_file("empty.csv", "row,col,date,B2,B3,B4,B5,B6,B7,B8\n")).empty());
}

TEST(LoadSeries, SingleRow) {
    const auto s = load_series(tmp_file("one.csv", "row,col,date,B2,B3,B4,B5,B6,B7,B8\n2,3,17,0.1,0.2,0.3,0.4,0.5,0.6,0.7\n"));
    ASSERT_EQ(s.size(), 1u);
    ASSERT_EQ(s[0].records.size(), 1u);
    const auto& r = s[0].records[0];
    EXPECT_EQ(r.row, 2);
    EXPECT_EQ(r.col, 3);
    EXPECT_EQ(r.date, 17);
    EXPECT_DOUBLE_EQ(r.band(Band::B2), 0.1);
    EXPECT_DOUBLE_EQ(r.band(Band::B8), 0.7);
}

TEST(LoadSeries, ShuffledDatesMatchSortedFile) {
    const std::string header = "row,col,date,B2,B3,B4,B5,B6,B7,B8\n";
    const std::vector<std::string> rows{"0,0,5,0.1,0.1,0.1,0.1,0.1,0.1,0.5\n", "0,1,1,0.1,0.2,0.1,0.1,0.1,0.1,0.5\n",
                                        "0,0,1,0.2,0.1,0.1,0.1,0.1,0.1,0.5\n", "0,0,9,0.3,0.1,0.1,0.1,0.1,0.1,0.5\n"};
    const auto sorted = load_series(tmp_file("sorted.csv", header + rows[2] + rows[0] + rows[3] + rows[1]));
    const auto shuffled = load_series(tmp_file("shuffled.csv", header + rows[3] + rows[1] + rows[0] + rows[2]));
    EXPECT_EQ(sorted, shuffled);
    ASSERT_EQ(sorted.size(), 2u);
    EXPECT_EQ(sorted[0].records.size(), 3u);
    EXPECT_EQ(sorted[0].records[0].date, 1);
    EXPECT_EQ(sorted[0].records[2].date, 9);
}

TEST(LoadSeries, ErrorsCarryLineNumbers) {
    const std::string header = "row,col,date,B2,B3,B4,B5,B6,B7,B8\n";
    try {
        load_series(tmp_file("dup.csv", header + "0,0,1,0.1,0.1,0.1,0.1,0.1,0.1,0.1\n0,0,1,0.1,0.1,0.1,0.1,0.1,0.1,0.1\n"));
        FAIL() << "expected duplicate-date error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    try {
        load_series(tmp_file("bad.csv", header + "0,0,1,0.1,0.1,abc,0.1,0.1,0.1,0.1\n"));
        FAIL() << "expected bad-number error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(load_series(tmp_file("missing.csv", "row,col,date,B2,B3,B4,B5,B6,B7\n")), ParseError);
    EXPECT_THROW(load_series(tmp_file("short.csv", header + "0,0,1,0.1\n")), ParseError);
}

TEST(LoadSeries, RoundTripThroughWriter) {
    SeriesCollection s{{1, 2, {{1, 2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}}, {1, 2, 8, {0.11, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}}}}};
    const auto path = tmp_file("rt.csv", "");
    write_series(path, s);
    EXPECT_EQ(load_series(path), s);
}

TEST(Fixtures, RsrAndSpectraLoad) {
    const std::string dir = FFCDNN_DATA_DIR "/fixtures/";
    const auto rsr = load_rsr(dir + "s2_rsr_gaussian.csv");
    ASSERT_EQ(rsr.size(), 7u);
    const auto spec = load_spectrum(dir + "spectrum_1.csv");
    for (const auto& c : rsr) {
        const double r = simulate_band(spec, c);
        EXPECT_GT(r, 0.0);
        EXPECT_LT(r, 1.0);
    }
    EXPECT_THROW(load_spectrum(tmp_file("nospec.csv", "wavelength_nm,reflectance\n")), ParseError);
}
