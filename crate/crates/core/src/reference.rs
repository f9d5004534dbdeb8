//! Published MSE values of the simulation study, used for side-by-side
//! rendering and for the acceptance suite.
//!
//! Layout: one row per smooth component (`f1`, `f2`, `f3`), and per column
//! parameter two entries `(ρ₁, ρ₂)`.

/// MA(1) parameters of the 1-dependent tables.
pub const GAMMA1_GRID: [f64; 7] = [-0.5, -0.4, -0.2, 0.0, 0.2, 0.4, 0.5];

/// AR(1) coefficients of the autoregressive tables.
pub const PHI_GRID: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];

/// Gaussian innovations, n = 1600.
pub const MA_GAUSSIAN_1600: [[[f64; 2]; 7]; 3] = [
    [
        [0.0359, 0.0050],
        [0.0303, 0.0045],
        [0.0213, 0.0045],
        [0.0126, 0.0040],
        [0.0064, 0.0035],
        [0.0022, 0.0033],
        [0.0010, 0.0032],
    ],
    [
        [0.0360, 0.0051],
        [0.0320, 0.0048],
        [0.0200, 0.0040],
        [0.0125, 0.0038],
        [0.0065, 0.0038],
        [0.0023, 0.0035],
        [0.0010, 0.0034],
    ],
    [
        [0.0388, 0.0053],
        [0.0326, 0.0048],
        [0.0215, 0.0046],
        [0.0128, 0.0038],
        [0.0064, 0.0037],
        [0.0025, 0.0037],
        [0.0011, 0.0036],
    ],
];

/// t₄ innovations, n = 1600.
pub const MA_T4_1600: [[[f64; 2]; 7]; 3] = [
    [
        [0.0126, 0.0034],
        [0.0108, 0.0028],
        [0.0069, 0.0024],
        [0.0047, 0.0019],
        [0.0024, 0.0016],
        [0.0010, 0.0013],
        [0.0005, 0.0014],
    ],
    [
        [0.0127, 0.0037],
        [0.0102, 0.0028],
        [0.0066, 0.0022],
        [0.0045, 0.0018],
        [0.0023, 0.0015],
        [0.0011, 0.0014],
        [0.0006, 0.0015],
    ],
    [
        [0.0128, 0.0031],
        [0.0102, 0.0030],
        [0.0078, 0.0024],
        [0.0049, 0.0021],
        [0.0029, 0.0017],
        [0.0011, 0.0015],
        [0.0006, 0.0015],
    ],
];

/// Gaussian innovations, n = 3000.
pub const MA_GAUSSIAN_3000: [[[f64; 2]; 7]; 3] = [
    [
        [0.0119, 0.0024],
        [0.0103, 0.0021],
        [0.0070, 0.0018],
        [0.0042, 0.0015],
        [0.0021, 0.0013],
        [0.0008, 0.0012],
        [0.0004, 0.0012],
    ],
    [
        [0.0123, 0.0023],
        [0.0107, 0.0021],
        [0.0072, 0.0016],
        [0.0041, 0.0014],
        [0.0021, 0.0013],
        [0.0008, 0.0012],
        [0.0004, 0.0012],
    ],
    [
        [0.0124, 0.0021],
        [0.0102, 0.0021],
        [0.0075, 0.0017],
        [0.0043, 0.0014],
        [0.0023, 0.0014],
        [0.0009, 0.0013],
        [0.0004, 0.0013],
    ],
];

/// AR(1) errors, difference estimator with m = 2.
pub const AR_DIFFERENCE_M2: [[[f64; 2]; 5]; 3] = [
    [
        [0.0087, 0.0033],
        [0.0053, 0.0023],
        [0.0021, 0.0008],
        [0.0005, 0.0010],
        [0.0019, 0.0068],
    ],
    [
        [0.0084, 0.0034],
        [0.0054, 0.0022],
        [0.0023, 0.0009],
        [0.0005, 0.0010],
        [0.0020, 0.0068],
    ],
    [
        [0.0092, 0.0035],
        [0.0056, 0.0023],
        [0.0022, 0.0008],
        [0.0005, 0.0009],
        [0.0018, 0.0067],
    ],
];

/// AR(1) errors, Hall–Van Keilegom estimator.
pub const AR_HVK: [[[f64; 2]; 5]; 3] = [
    [
        [0.0233, 0.0097],
        [0.0190, 0.0093],
        [0.0144, 0.0078],
        [0.0126, 0.0083],
        [0.0146, 0.0152],
    ],
    [
        [0.0218, 0.0091],
        [0.0186, 0.0091],
        [0.0153, 0.0081],
        [0.0129, 0.0083],
        [0.0151, 0.0158],
    ],
    [
        [0.0285, 0.0134],
        [0.0230, 0.0125],
        [0.0206, 0.0124],
        [0.0164, 0.0111],
        [0.0214, 0.0202],
    ],
];

/// AR(1) errors, difference estimator with m = 3, f₁ only.
pub const AR_DIFFERENCE_M3_F1: [[f64; 2]; 5] = [
    [0.0178, 0.0104],
    [0.0122, 0.0092],
    [0.0073, 0.0059],
    [0.0031, 0.0026],
    [0.0006, 0.0006],
];
