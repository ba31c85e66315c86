//! Published reference values for the four-sector bond default study.
//!
//! Only the sector totals and the correlation matrix are inputs to any
//! computation here. The estimates, BIC values, log-likelihood ratios and
//! risk figures were produced from per-period default series that were
//! never published, so they cannot be regenerated. They are carried as
//! documentation and reported verbatim, never asserted against.

use serde::Serialize;

pub const SECTORS: [&str; 4] = ["Consumer", "Energy", "Media", "Transport"];

/// Sector totals and defaults, `sector,total,defaults`.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

/// Pairwise correlations of sector default counts, in `SECTORS` order.
pub const CORRELATIONS: [[f64; 4]; 4] = [
    [1.0, 0.0224, 0.6013, 0.3487],
    [0.0224, 1.0, 0.1258, 0.1045],
    [0.6013, 0.1258, 1.0, 0.3708],
    [0.3487, 0.1045, 0.3708, 1.0],
];

/// Published partner of each sector (index into `SECTORS`).
pub const PARTNERS: [usize; 4] = [2, 2, 0, 2];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PublishedFit {
    pub sector: &'static str,
    pub partner: &'static str,
    pub a: [f64; 4],
    pub alpha: [f64; 2],
    pub bic_proposed: f64,
    pub bic_baseline: f64,
}

pub const PUBLISHED_FITS: [PublishedFit; 4] = [
    PublishedFit {
        sector: "Consumer",
        partner: "Media",
        a: [0.0007, 0.0018, 0.0013, 0.0049],
        alpha: [0.0013, 0.0043],
        bic_proposed: 419.0813,
        bic_baseline: 434.6700,
    },
    PublishedFit {
        sector: "Energy",
        partner: "Media",
        a: [0.0004, 0.0033, 0.0018, 0.0032],
        alpha: [0.0018, 0.0023],
        bic_proposed: 215.4654,
        bic_baseline: 231.8225,
    },
    PublishedFit {
        sector: "Media",
        partner: "Consumer",
        a: [0.0005, 0.0005, 0.0017, 0.0042],
        alpha: [0.0005, 0.0033],
        bic_proposed: 301.2534,
        bic_baseline: 321.0501,
    },
    PublishedFit {
        sector: "Transport",
        partner: "Media",
        a: [0.0013, 0.0012, 0.0026, 0.0052],
        alpha: [0.0013, 0.0036],
        bic_proposed: 2.1287,
        bic_baseline: 2.1460,
    },
];

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PublishedRatio {
    pub sector: &'static str,
    pub alternative: &'static str,
    pub log_likelihood_ratio: f64,
}

pub const PUBLISHED_RATIOS: [PublishedRatio; 8] = [
    PublishedRatio {
        sector: "Consumer",
        alternative: "Energy",
        log_likelihood_ratio: 33.1330,
    },
    PublishedRatio {
        sector: "Energy",
        alternative: "Consumer",
        log_likelihood_ratio: 7.3286,
    },
    PublishedRatio {
        sector: "Media",
        alternative: "Energy",
        log_likelihood_ratio: 18.6264,
    },
    PublishedRatio {
        sector: "Transport",
        alternative: "Consumer",
        log_likelihood_ratio: 1.9942,
    },
    PublishedRatio {
        sector: "Consumer",
        alternative: "Transport",
        log_likelihood_ratio: 10.7231,
    },
    PublishedRatio {
        sector: "Energy",
        alternative: "Transport",
        log_likelihood_ratio: 7.3495,
    },
    PublishedRatio {
        sector: "Media",
        alternative: "Transport",
        log_likelihood_ratio: 14.6136,
    },
    PublishedRatio {
        sector: "Transport",
        alternative: "Energy",
        log_likelihood_ratio: 8.4934,
    },
];

/// CRVaR and CRES at β = 0.05 and 0.01, as `[crvar_05, cres_05, crvar_01, cres_01]`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PublishedRisk {
    pub sector: &'static str,
    pub proposed: [f64; 4],
    pub baseline: [f64; 4],
}

pub const PUBLISHED_RISK: [PublishedRisk; 4] = [
    PublishedRisk {
        sector: "Consumer",
        proposed: [374.1, 424.7, 457.1, 495.1],
        baseline: [114.1, 146.1, 166.1, 195.6],
    },
    PublishedRisk {
        sector: "Energy",
        proposed: [25.1, 33.8, 39.1, 47.5],
        baseline: [12.1, 17.1, 20.1, 24.5],
    },
    PublishedRisk {
        sector: "Media",
        proposed: [122.1, 150.4, 168.1, 192.4],
        baseline: [34.1, 45.7, 52.1, 63.3],
    },
    PublishedRisk {
        sector: "Transport",
        proposed: [26.1, 33.8, 39.1, 46.5],
        baseline: [10.10, 14.1, 16.1, 20.2],
    },
];

pub const NOT_REPRODUCIBLE: &str = "Estimates, BIC values, log-likelihood ratios, risk measures and the \
surviving-bond and loss-distribution figures were computed from per-period default series that were not \
published. They are reported for reference only and cannot be regenerated from the bundled data.";
