// Sparse stochastic block model: compare the spectrum of A/(sigma sqrt n) with
// the QVE prediction, and show the two perturbation bounds that connect the
// adjacency matrix with its centered version.

#include <graphon_spectra.hpp>

#include <cmath>
#include <cstdio>

namespace gs = graphon_spectra;

int main() {
    const std::size_t n = 1024;
    const std::size_t d = 16;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd p(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
        for (Eigen::Index l = 0; l < p.cols(); ++l) p(k, l) = ((k + l) % 2 == 0 ? 0.7 : 0.3) * scale;
    }
    const std::vector<std::size_t> sizes(d, n / d);
    const gs::EnsembleSample s = gs::sample_sbm(sizes, p, 2024);

    gs::EnsembleSpec spec = s.spec;
    const gs::Prediction pred = gs::prediction_for(spec);
    gs::CompareOptions opt;
    opt.max_order = 4;
    const gs::PredictionSummary summary = gs::summarize_prediction(pred.graphon, opt);

    const gs::Spectrum sp = gs::eigenvalues_symmetric(s.matrix);
    const gs::CompareResult r = gs::compare_spectrum(sp, summary, opt);
    std::printf("KS distance to QVE CDF: %.4f\nL1 density distance:    %.4f\n", r.ks, r.l1);
    for (int k = 2; k <= 4; k += 2) {
        std::printf("moment %d: sample %.4f, predicted %.4f\n", k, r.empirical.at(k), summary.moments.at(k));
    }

    const gs::Spectrum centered = gs::eigenvalues_symmetric(s.variant("centered").matrix);
    const double levy = gs::levy_distance(sp, centered);
    std::printf("Levy^3(A, A - EA) = %.3e <= (1/n) tr(EA^2) = %.3e\n", levy * levy * levy,
                gs::levy_cube_bound(s.matrix, s.variant("centered").matrix));

    const gs::Spectrum aug = gs::eigenvalues_symmetric(s.variant("augmented").matrix);
    const gs::Spectrum aug_c = gs::eigenvalues_symmetric(s.variant("augmented-centered").matrix);
    std::printf("KS(A~, A~ - EA~) = %.4f <= d/n = %.4f\n", gs::kolmogorov_distance(aug, aug_c),
                static_cast<double>(d) / static_cast<double>(n));
    return 0;
}
