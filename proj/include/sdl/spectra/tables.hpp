#ifndef SDL_SPECTRA_TABLES_HPP
#define SDL_SPECTRA_TABLES_HPP

#include <array>

// Standard colorimetric data, tabulated on 380..780 nm.
namespace sdl::spectra::tables {

inline constexpr double kStart = 380.0;
inline constexpr double kEnd = 780.0;
inline constexpr double kStep5 = 5.0;
inline constexpr double kStep10 = 10.0;

// CIE standard illuminant D65, relative spectral power, 5 nm.
inline constexpr std::array<double, 81> kD65 = {
    49.9755, 52.3118, 54.6482, 68.7015, 82.7549, 87.1204,
    91.486, 92.4589, 93.4318, 90.057, 86.6823, 95.7736,
    104.865, 110.936, 117.008, 117.41, 117.812, 116.336,
    114.861, 115.392, 115.923, 112.367, 108.811, 109.082,
    109.354, 108.578, 107.802, 106.296, 104.79, 106.239,
    107.689, 106.047, 104.405, 104.225, 104.046, 102.023,
    100, 98.1671, 96.3342, 96.0611, 95.788, 92.2368,
    88.6856, 89.3459, 90.0062, 89.8026, 89.5991, 88.6489,
    87.6987, 85.4936, 83.2886, 83.4939, 83.6992, 81.863,
    80.0268, 80.1207, 80.2146, 81.2462, 82.2778, 80.281,
    78.2842, 74.0027, 69.7213, 70.6652, 71.6091, 72.979,
    74.349, 67.9765, 61.604, 65.7448, 69.8856, 72.4863,
    75.087, 69.3398, 63.5927, 54.9859, 46.4182, 56.6118,
    66.8054, 65.0941, 63.3828,
};

// CIE 1964 10-degree standard observer, 5 nm.
inline constexpr std::array<double, 81> kXBar10 = {
    0.00016, 0.000662, 0.002362, 0.007242, 0.01911, 0.0434,
    0.084736, 0.140638, 0.204492, 0.264737, 0.314679, 0.357719,
    0.383734, 0.386726, 0.370702, 0.342957, 0.302273, 0.254085,
    0.195618, 0.132349, 0.080507, 0.041072, 0.016172, 0.005132,
    0.003816, 0.015444, 0.037465, 0.071358, 0.117749, 0.172953,
    0.236491, 0.304213, 0.376772, 0.451584, 0.529826, 0.616053,
    0.705224, 0.793832, 0.878655, 0.951162, 1.01416, 1.0743,
    1.11852, 1.1343, 1.12399, 1.0891, 1.03048, 0.95074,
    0.856297, 0.75493, 0.647467, 0.53511, 0.431567, 0.34369,
    0.268329, 0.2043, 0.152568, 0.11221, 0.081261, 0.05793,
    0.040851, 0.028623, 0.019941, 0.013842, 0.009577, 0.006605,
    0.004553, 0.003145, 0.002175, 0.001506, 0.001045, 0.000727,
    0.000508, 0.000356, 0.000251, 0.000178, 0.000126, 9e-05,
    6.5e-05, 4.6e-05, 3.3e-05,
};
inline constexpr std::array<double, 81> kYBar10 = {
    1.7e-05, 7.2e-05, 0.000253, 0.000769, 0.002004, 0.004509,
    0.008756, 0.014456, 0.021391, 0.029497, 0.038676, 0.049602,
    0.062077, 0.074704, 0.089456, 0.106256, 0.128201, 0.152761,
    0.18519, 0.21994, 0.253589, 0.297665, 0.339133, 0.395379,
    0.460777, 0.53136, 0.606741, 0.68566, 0.761757, 0.82333,
    0.875211, 0.92381, 0.961988, 0.9822, 0.991761, 0.99911,
    0.99734, 0.98238, 0.955552, 0.915175, 0.868934, 0.825623,
    0.777405, 0.720353, 0.658341, 0.593878, 0.527963, 0.461834,
    0.398057, 0.339554, 0.283493, 0.228254, 0.179828, 0.140211,
    0.107633, 0.081187, 0.060281, 0.044096, 0.0318, 0.022602,
    0.015905, 0.01113, 0.007749, 0.005375, 0.003718, 0.002565,
    0.001768, 0.001222, 0.000846, 0.000586, 0.000407, 0.000284,
    0.000199, 0.00014, 9.8e-05, 7e-05, 5e-05, 3.6e-05,
    2.5e-05, 1.8e-05, 1.3e-05,
};
inline constexpr std::array<double, 81> kZBar10 = {
    0.000705, 0.002928, 0.010482, 0.032344, 0.086011, 0.19712,
    0.389366, 0.65676, 0.972542, 1.2825, 1.55348, 1.7985,
    1.96728, 2.0273, 1.9948, 1.9007, 1.74537, 1.5549,
    1.31756, 1.0302, 0.772125, 0.57006, 0.415254, 0.302356,
    0.218502, 0.159249, 0.112044, 0.082248, 0.060709, 0.04305,
    0.030451, 0.020584, 0.013676, 0.007918, 0.003988, 0.001091,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0, 0, 0, 0,
    0, 0, 0,
};

// CIE photopic luminous efficiency V(lambda), 10 nm.
inline constexpr std::array<double, 41> kV10 = {
    3.9e-05, 0.00012, 0.000396, 0.00121, 0.004, 0.0116,
    0.023, 0.038, 0.06, 0.09098, 0.13902, 0.20802,
    0.323, 0.503, 0.71, 0.862, 0.954, 0.99495,
    0.995, 0.952, 0.87, 0.757, 0.631, 0.503,
    0.381, 0.265, 0.175, 0.107, 0.061, 0.032,
    0.017, 0.00821, 0.004102, 0.002091, 0.001047, 0.00052,
    0.000249, 0.00012, 6e-05, 3e-05, 1.5e-05,
};

}  // namespace sdl::spectra::tables

#endif
