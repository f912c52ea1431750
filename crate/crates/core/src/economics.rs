//! Cost model comparing manual and automated auditing: savings, ROI,
//! payback period, multi-year projections and freed-capacity valuation.
//!
//! All currency amounts are integer cents; divisions happen only at the
//! reporting boundary so every figure reproduces to the cent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EconError {
    #[error("manual cost per audit must be positive")]
    ZeroManualCost,
    #[error("field {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("cannot parse money value {0:?} (expected e.g. \"75.00\")")]
    BadMoney(String),
}

/// An amount in integer cents of the scenario currency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money {
    pub cents: i64,
}

impl Money {
    pub const fn from_cents(cents: i64) -> Money {
        Money { cents }
    }

    /// Parse a decimal string such as "75.00" or "45000" (at most two
    /// decimal places, optional thousands commas) into exact cents.
    pub fn parse(text: &str) -> Result<Money, EconError> {
        let cleaned: String = text.trim().chars().filter(|c| *c != ',').collect();
        let bad = || EconError::BadMoney(text.to_string());
        let (sign, digits) = match cleaned.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, cleaned.as_str()),
        };
        let (whole, frac) = match digits.split_once('.') {
            Some((w, f)) => (w, f),
            None => (digits, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if frac.len() > 2 || !whole.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole_value: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_value: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| bad())? * 10,
            _ => frac.parse().map_err(|_| bad())?,
        };
        Ok(Money {
            cents: sign * (whole_value * 100 + frac_value),
        })
    }

    /// "1,496.60" style rendering (no currency symbol).
    pub fn format(self) -> String {
        let negative = self.cents < 0;
        let abs = self.cents.unsigned_abs();
        let whole = abs / 100;
        let frac = abs % 100;
        let mut digits = whole.to_string();
        let mut grouped = String::new();
        while digits.len() > 3 {
            let split = digits.len() - 3;
            grouped = format!(",{}{}", &digits[split..], grouped);
            digits.truncate(split);
        }
        format!(
            "{}{digits}{grouped}.{frac:02}",
            if negative { "-" } else { "" }
        )
    }
}

/// Inputs of one cost comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicScenario {
    /// ISO 4217 code; purely descriptive, no conversion happens.
    pub currency: String,
    pub manual_cost_per_audit: Money,
    pub automated_cost_per_audit: Money,
    pub audits_per_month: u32,
    pub manual_minutes_per_audit: u32,
    pub automated_minutes_per_audit: u32,
    pub initial_investment: Money,
    pub hourly_rate: Money,
}

impl EconomicScenario {
    /// The built-in default: one auditor-hour at 75.00 vs 0.17 per
    /// automated request, twenty audits a month, 45,000.00 invested.
    pub fn default_case() -> EconomicScenario {
        EconomicScenario {
            currency: "BRL".to_string(),
            manual_cost_per_audit: Money::from_cents(7_500),
            automated_cost_per_audit: Money::from_cents(17),
            audits_per_month: 20,
            manual_minutes_per_audit: 60,
            automated_minutes_per_audit: 20,
            initial_investment: Money::from_cents(4_500_000),
            hourly_rate: Money::from_cents(7_500),
        }
    }

    pub fn validate(&self) -> Result<(), EconError> {
        let nonneg = |field: &'static str, m: Money| {
            if m.cents < 0 {
                Err(EconError::InvalidField {
                    field,
                    reason: "must not be negative".into(),
                })
            } else {
                Ok(())
            }
        };
        nonneg("manual_cost_per_audit", self.manual_cost_per_audit)?;
        nonneg("automated_cost_per_audit", self.automated_cost_per_audit)?;
        nonneg("initial_investment", self.initial_investment)?;
        nonneg("hourly_rate", self.hourly_rate)?;
        Ok(())
    }
}

/// Derived savings, returns and projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconomicReport {
    pub currency: String,
    pub monthly_cost_manual: Money,
    pub monthly_cost_automated: Money,
    pub monthly_savings: Money,
    pub annual_savings: Money,
    /// None when the investment is zero (ratio undefined).
    pub roi_year1_percent: Option<f64>,
    /// None when monthly savings are not positive (never pays back).
    pub payback_months: Option<f64>,
    pub cost_reduction_percent: f64,
    pub time_saved_hours_per_month: f64,
    /// Valued from time saved rounded to tenths of an hour, the
    /// granularity capacity ledgers are kept in.
    pub freed_capacity_value: Money,
    /// Cumulative (year, percent) pairs; empty when ROI is undefined.
    pub cumulative_roi_by_year: Vec<(u32, f64)>,
}

/// Percentage cost reduction per audit.
pub fn cost_reduction(manual: Money, automated: Money) -> Result<f64, EconError> {
    if manual.cents <= 0 {
        return Err(EconError::ZeroManualCost);
    }
    Ok((manual.cents - automated.cents) as f64 / manual.cents as f64 * 100.0)
}

/// Evaluate a scenario over `horizon_years`.
pub fn evaluate_scenario(
    scenario: &EconomicScenario,
    horizon_years: u32,
) -> Result<EconomicReport, EconError> {
    scenario.validate()?;
    if scenario.manual_cost_per_audit.cents <= 0 {
        return Err(EconError::ZeroManualCost);
    }
    let audits = scenario.audits_per_month as i64;
    let monthly_cost_manual = Money::from_cents(scenario.manual_cost_per_audit.cents * audits);
    let monthly_cost_automated =
        Money::from_cents(scenario.automated_cost_per_audit.cents * audits);
    let monthly_savings =
        Money::from_cents(monthly_cost_manual.cents - monthly_cost_automated.cents);
    let annual_savings = Money::from_cents(12 * monthly_savings.cents);

    let investment = scenario.initial_investment.cents;
    let roi_for_year =
        |year: i64| (year * annual_savings.cents - investment) as f64 / investment as f64 * 100.0;
    let (roi_year1_percent, cumulative_roi_by_year) = if investment > 0 {
        let series: Vec<(u32, f64)> = (1..=horizon_years.max(1))
            .map(|y| (y, roi_for_year(y as i64)))
            .collect();
        (Some(roi_for_year(1)), series)
    } else {
        (None, Vec::new())
    };

    let payback_months = (monthly_savings.cents > 0 && investment > 0)
        .then(|| investment as f64 / monthly_savings.cents as f64)
        .or(if investment == 0 && monthly_savings.cents > 0 {
            Some(0.0)
        } else {
            None
        });

    let minutes_saved = (scenario.manual_minutes_per_audit as i64
        - scenario.automated_minutes_per_audit as i64)
        * audits;
    let time_saved_hours_per_month = minutes_saved as f64 / 60.0;
    // value the saved time at tenth-of-hour resolution, rounding half up
    let tenths = (time_saved_hours_per_month * 10.0).round() as i64;
    let freed_capacity_value =
        Money::from_cents((tenths * scenario.hourly_rate.cents + 5).div_euclid(10));

    Ok(EconomicReport {
        currency: scenario.currency.clone(),
        monthly_cost_manual,
        monthly_cost_automated,
        monthly_savings,
        annual_savings,
        roi_year1_percent,
        payback_months,
        cost_reduction_percent: cost_reduction(
            scenario.manual_cost_per_audit,
            scenario.automated_cost_per_audit,
        )?,
        time_saved_hours_per_month,
        freed_capacity_value,
        cumulative_roi_by_year,
    })
}

/// Load a scenario from a flat key/value TOML document. Money fields are
/// decimal strings so cents stay exact.
pub fn load_scenario(text: &str) -> Result<EconomicScenario, EconError> {
    #[derive(Deserialize)]
    struct RawScenario {
        #[serde(default = "default_currency")]
        currency: String,
        manual_cost_per_audit: String,
        automated_cost_per_audit: String,
        audits_per_month: u32,
        manual_minutes_per_audit: u32,
        automated_minutes_per_audit: u32,
        initial_investment: String,
        hourly_rate: String,
    }
    fn default_currency() -> String {
        "BRL".to_string()
    }

    let raw: RawScenario = toml::from_str(text).map_err(|e| EconError::InvalidField {
        field: "scenario",
        reason: e.to_string(),
    })?;
    let scenario = EconomicScenario {
        currency: raw.currency,
        manual_cost_per_audit: Money::parse(&raw.manual_cost_per_audit)?,
        automated_cost_per_audit: Money::parse(&raw.automated_cost_per_audit)?,
        audits_per_month: raw.audits_per_month,
        manual_minutes_per_audit: raw.manual_minutes_per_audit,
        automated_minutes_per_audit: raw.automated_minutes_per_audit,
        initial_investment: Money::parse(&raw.initial_investment)?,
        hourly_rate: Money::parse(&raw.hourly_rate)?,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Currency symbol for report rendering.
pub fn currency_symbol(code: &str) -> &str {
    match code {
        "BRL" => "R$",
        "USD" => "$",
        "EUR" => "\u{20ac}",
        _ => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn money_parse_and_format() {
        assert_eq!(Money::parse("75.00").unwrap().cents, 7_500);
        assert_eq!(Money::parse("0.17").unwrap().cents, 17);
        assert_eq!(Money::parse("45000").unwrap().cents, 4_500_000);
        assert_eq!(Money::parse("45,000.00").unwrap().cents, 4_500_000);
        assert_eq!(Money::parse("1.5").unwrap().cents, 150);
        assert!(Money::parse("1.234").is_err());
        assert!(Money::parse("abc").is_err());
        assert!(Money::parse("").is_err());

        assert_eq!(Money::from_cents(149_660).format(), "1,496.60");
        assert_eq!(Money::from_cents(1_795_920).format(), "17,959.20");
        assert_eq!(Money::from_cents(99_750).format(), "997.50");
        assert_eq!(Money::from_cents(-6_050).format(), "-60.50");
        assert_eq!(Money::from_cents(5).format(), "0.05");
    }

    #[test]
    fn default_case_reproduces_reference_figures() {
        let report = evaluate_scenario(&EconomicScenario::default_case(), 5).unwrap();
        assert_eq!(report.monthly_cost_manual.cents, 150_000);
        assert_eq!(report.monthly_cost_automated.cents, 340);
        assert_eq!(report.monthly_savings.cents, 149_660);
        assert_eq!(report.annual_savings.cents, 1_795_920);
        assert!((report.roi_year1_percent.unwrap() - (-60.1)).abs() < 0.05);
        assert!((report.payback_months.unwrap() - 30.1).abs() < 0.05);
        assert!((report.cost_reduction_percent - 99.8).abs() < 0.05);
        assert!((report.time_saved_hours_per_month - 13.3).abs() < 0.05);
        assert_eq!(report.freed_capacity_value.cents, 99_750);

        let roi: Vec<f64> = report.cumulative_roi_by_year.iter().map(|p| p.1).collect();
        let expected = [-60.1, -20.2, 19.7, 59.6, 99.5];
        for (got, want) in roi.iter().zip(expected) {
            assert!((got - want).abs() < 0.1, "got {got} want {want}");
        }
    }

    #[test]
    fn payback_times_savings_recovers_investment() {
        let scenario = EconomicScenario::default_case();
        let report = evaluate_scenario(&scenario, 1).unwrap();
        let recovered = report.payback_months.unwrap() * report.monthly_savings.cents as f64;
        assert!((recovered - scenario.initial_investment.cents as f64).abs() <= 1.0);
    }

    #[test]
    fn roi_series_is_linear_in_years() {
        let report = evaluate_scenario(&EconomicScenario::default_case(), 5).unwrap();
        let series = &report.cumulative_roi_by_year;
        let step = report.annual_savings.cents as f64 / 4_500_000.0 * 100.0;
        for window in series.windows(2) {
            assert!((window[1].1 - window[0].1 - step).abs() < 1e-9);
            assert!(window[1].1 > window[0].1);
        }
    }

    #[test]
    fn zero_investment_yields_absent_roi() {
        let mut scenario = EconomicScenario::default_case();
        scenario.initial_investment = Money::from_cents(0);
        let report = evaluate_scenario(&scenario, 5).unwrap();
        assert_eq!(report.roi_year1_percent, None);
        assert!(report.cumulative_roi_by_year.is_empty());
        assert_eq!(report.payback_months, Some(0.0));
    }

    #[test]
    fn roi_zero_when_benefit_equals_investment() {
        let mut scenario = EconomicScenario::default_case();
        // make one year of savings exactly equal the investment
        scenario.initial_investment = Money::from_cents(
            12 * (scenario.manual_cost_per_audit.cents - scenario.automated_cost_per_audit.cents)
                * 20,
        );
        let report = evaluate_scenario(&scenario, 1).unwrap();
        assert_eq!(report.roi_year1_percent, Some(0.0));
    }

    #[test]
    fn zero_savings_has_no_payback() {
        let mut scenario = EconomicScenario::default_case();
        scenario.automated_cost_per_audit = scenario.manual_cost_per_audit;
        let report = evaluate_scenario(&scenario, 3).unwrap();
        assert_eq!(report.payback_months, None);
        assert_eq!(report.monthly_savings.cents, 0);
    }

    #[test]
    fn cost_reduction_examples() {
        let r = cost_reduction(Money::from_cents(7_500), Money::from_cents(17)).unwrap();
        assert!((r - 99.77333333).abs() < 1e-6);
        assert_eq!(format!("{:.1}", r), "99.8");

        assert_eq!(
            cost_reduction(Money::from_cents(500), Money::from_cents(500)).unwrap(),
            0.0
        );
        assert_eq!(
            cost_reduction(Money::from_cents(10_000), Money::from_cents(0)).unwrap(),
            100.0
        );
        assert_eq!(
            cost_reduction(Money::from_cents(0), Money::from_cents(10)),
            Err(EconError::ZeroManualCost)
        );
    }

    #[test]
    fn savings_scale_linearly_with_audit_volume() {
        let base = evaluate_scenario(&EconomicScenario::default_case(), 1).unwrap();
        let mut doubled = EconomicScenario::default_case();
        doubled.audits_per_month *= 2;
        let report = evaluate_scenario(&doubled, 1).unwrap();
        assert_eq!(report.monthly_savings.cents, 2 * base.monthly_savings.cents);
    }

    #[test]
    fn scenario_loads_from_toml() {
        let text = r#"
currency = "BRL"
manual_cost_per_audit = "75.00"
automated_cost_per_audit = "0.17"
audits_per_month = 20
manual_minutes_per_audit = 60
automated_minutes_per_audit = 20
initial_investment = "45000.00"
hourly_rate = "75.00"
"#;
        let scenario = load_scenario(text).unwrap();
        assert_eq!(scenario, EconomicScenario::default_case());

        let err = load_scenario("audits_per_month = 20").unwrap_err();
        assert!(matches!(
            err,
            EconError::InvalidField {
                field: "scenario",
                ..
            }
        ));
    }
}
