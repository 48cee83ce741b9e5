// Moments of a two-block variance profile three ways: tree homomorphism
// densities, the large-|z| series of the QVE, and a sampled matrix.

#include <graphon_spectra.hpp>

#include <cstdio>

namespace gs = graphon_spectra;

int main() {
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 2.0, 2.0, 3.0;
    const gs::StepGraphon w = gs::StepGraphon::equal_blocks(s);

    const gs::MomentTable trees = gs::wigner_moments(8, w);
    const gs::MomentTable series = gs::series_moments(w, 8);

    const gs::EnsembleSample sample = gs::sample_wigner_type(w, 1500, gs::EntryDist::Gaussian, 7);
    const gs::Spectrum sp = gs::eigenvalues_symmetric(sample.matrix);
    const gs::MomentTable empirical = gs::esd_moments(sp, 8);

    std::printf("%5s %14s %14s %14s\n", "order", "trees", "qve-series", "sample n=1500");
    for (int k = 0; k <= 8; k += 2) {
        std::printf("%5d %14.6f %14.6f %14.6f\n", k, trees.at(k), series.at(k), empirical.at(k));
    }

    const gs::cplx z(0.5, 0.05);
    const gs::QveSolution sol = gs::solve_qve(w, z);
    std::printf("\ns(0.5 + 0.05i): qve %.6f%+.6fi, sample %.6f%+.6fi\n", sol.s.real(), sol.s.imag(),
                gs::empirical_stieltjes(sp, z).real(), gs::empirical_stieltjes(sp, z).imag());
    return 0;
}
