use std::path::Path;

use tightframe::frames::{
    build_combined_hahn_frame, build_hahn_frame, build_kraw_frame, build_xi_frame, fixtures, frame_operator_residual,
    gram_vs_kernel_check, match_fixture, FrameFamily, FrameMatrix, FrameReport,
};
use tightframe::hahn_mv::{e_kernel, hahn_basis, monic_hahn, monic_projection, reproducing_kernel, HahnParams, KernelForm};
use tightframe::krawtchouk_mv::{f_kernel, kraw_basis, kraw_reproducing_kernel, KrawParams};
use tightframe::lattice::MultiIndex;
use tightframe::scalar::{format_rational, parse_rational, Rational, Scalar, ToleranceProfile};

use crate::args::{EvalArgs, EvalFamily, Format, GenArgs, GenFamily, Mode, SelftestArgs, VerifyArgs, Via};
use crate::output::{emit, frame_to_csv};
use crate::CliError;

fn missing(flag: &str) -> CliError {
    CliError::Invalid(format!("missing --{flag}"))
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| missing(flag))
}

fn required_str<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref().ok_or_else(|| missing(flag))
}

/// Parses one number: `"p/q"` or an integer in exact mode, additionally a
/// decimal in float mode.
fn parse_number<S: Scalar>(text: &str, mode: Mode) -> Result<S, CliError> {
    let text = text.trim();
    match (mode, parse_rational(text)) {
        (_, Ok(r)) => Ok(S::from_rational(&r)),
        (Mode::Exact, Err(e)) => Err(CliError::Invalid(format!("'{text}' in exact mode: {e}"))),
        (Mode::Float, Err(_)) => {
            let v: f64 = text
                .parse()
                .map_err(|_| CliError::Invalid(format!("'{text}' is not a number")))?;
            let r = Rational::from_float(v).ok_or_else(|| CliError::Invalid(format!("'{text}' is not finite")))?;
            Ok(S::from_rational(&r))
        }
    }
}

fn parse_numbers<S: Scalar>(text: &str, mode: Mode) -> Result<Vec<S>, CliError> {
    text.split(',').map(|t| parse_number(t, mode)).collect()
}

fn parse_indices(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Invalid(format!("'{t}' is not a nonnegative integer")))
        })
        .collect()
}

fn parse_index(text: &str) -> Result<MultiIndex, CliError> {
    Ok(MultiIndex::new(parse_indices(text)?))
}

fn build_frame<S: Scalar>(a: &GenArgs) -> Result<FrameMatrix, CliError> {
    let frame = match a.family {
        GenFamily::Xi => build_xi_frame::<S>(a.d, required(a.big_n, "N")?)?,
        GenFamily::Hahn => {
            let kappa = parse_numbers::<S>(required_str(&a.kappa, "kappa")?, a.mode)?;
            build_hahn_frame(a.d, required(a.n, "n")?, required(a.m, "m")?, &kappa)?
        }
        GenFamily::Kraw => {
            let rho = parse_numbers::<S>(required_str(&a.rho, "rho")?, a.mode)?;
            build_kraw_frame(a.d, required(a.n, "n")?, required(a.m, "m")?, &rho)?
        }
        GenFamily::Combined => {
            let kappa = parse_numbers::<S>(required_str(&a.kappa, "kappa")?, a.mode)?;
            let m_list = parse_indices(required_str(&a.m_list, "m-list")?)?;
            build_combined_hahn_frame(a.d, required(a.big_n, "N")?, &m_list, &kappa)?
        }
    };
    Ok(frame)
}

pub fn gen(a: &GenArgs) -> Result<(), CliError> {
    let frame = match a.mode {
        Mode::Exact => build_frame::<Rational>(a)?,
        Mode::Float => build_frame::<f64>(a)?,
    };
    let text = match a.format {
        Format::Json => frame.to_json() + "\n",
        Format::Csv => frame_to_csv(&frame)?,
    };
    emit(&text, a.output.as_deref())?;
    eprintln!(
        "{:?} d={} n={} m_or_N={}: {} x {} matrix, {} elements",
        frame.family,
        frame.d,
        frame.n,
        frame.m_or_n,
        frame.rows(),
        frame.cols(),
        frame.cols()
    );
    Ok(())
}

fn load_frame(a: &VerifyArgs) -> Result<FrameMatrix, CliError> {
    if let Some(name) = &a.fixture {
        return Ok(fixtures::load(name)?);
    }
    let path: &Path = a.input.as_deref().ok_or_else(|| missing("input"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(FrameMatrix::from_json(&text)?)
}

fn residual_text(r: &FrameReport) -> String {
    if r.exact && r.tight {
        "exact 0".to_string()
    } else {
        format!("{:e}", r.tight_residual)
    }
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let frame = load_frame(a)?;
    let exact = frame.is_exact()?;
    let profile = if exact {
        ToleranceProfile::exact()
    } else {
        ToleranceProfile::float(a.tol)
    };
    let gram = a.gram && matches!(frame.family, FrameFamily::HahnH | FrameFamily::KrawK | FrameFamily::XiRational);
    let report = if gram {
        gram_vs_kernel_check(&frame, &profile)?
    } else {
        frame_operator_residual(&frame, &profile)?
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    println!("residual: {}", residual_text(&report));
    if a.gram && !gram {
        eprintln!("note: no Gram identity is known for {:?} frames", frame.family);
    }
    let ok = report.tight && report.gram_kernel_ok != Some(false);
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "not a tight frame (tight={}, gram={:?})",
            report.tight, report.gram_kernel_ok
        )))
    }
}

fn hahn_params<S: Scalar>(a: &EvalArgs) -> Result<HahnParams<S>, CliError> {
    let kappa = parse_numbers::<S>(required_str(&a.kappa, "kappa")?, a.mode)?;
    Ok(HahnParams::new(kappa, required(a.big_n, "N")?)?)
}

fn kraw_params<S: Scalar>(a: &EvalArgs) -> Result<KrawParams<S>, CliError> {
    let rho = parse_numbers::<S>(required_str(&a.rho, "rho")?, a.mode)?;
    Ok(KrawParams::new(rho, required(a.big_n, "N")?)?)
}

fn evaluate<S: Scalar>(a: &EvalArgs) -> Result<S, CliError> {
    let point = || parse_index(required_str(&a.x, "x")?);
    let value = match a.family {
        EvalFamily::HahnBasis => hahn_basis(&parse_index(required_str(&a.nu, "nu")?)?, &point()?, &hahn_params(a)?)?,
        EvalFamily::KrawBasis => kraw_basis(&parse_index(required_str(&a.nu, "nu")?)?, &point()?, &kraw_params(a)?)?,
        EvalFamily::MonicHahn => {
            monic_hahn(&parse_index(required_str(&a.alpha, "alpha")?)?, &point()?, &hahn_params(a)?)?
        }
        EvalFamily::MonicProj => monic_projection(
            &parse_index(required_str(&a.alpha, "alpha")?)?,
            required(a.n, "n")?,
            &point()?,
            &hahn_params(a)?,
        )?,
        EvalFamily::EKernel | EvalFamily::FKernel => {
            let alpha = parse_numbers::<S>(required_str(&a.alpha, "alpha")?, a.mode)?;
            let x = parse_numbers::<S>(required_str(&a.x, "x")?, a.mode)?;
            let k = required(a.k, "k")?;
            if a.family == EvalFamily::EKernel {
                let kappa = parse_numbers::<S>(required_str(&a.kappa, "kappa")?, a.mode)?;
                e_kernel(k, &alpha, &x, &kappa)?
            } else {
                let rho = parse_numbers::<S>(required_str(&a.rho, "rho")?, a.mode)?;
                f_kernel(k, &alpha, &x, &rho)?
            }
        }
        EvalFamily::Repkernel => {
            let n = required(a.n, "n")?;
            let y = parse_index(required_str(&a.y, "y")?)?;
            let via = match a.via {
                Via::Basis => KernelForm::Basis,
                Via::Monic => KernelForm::Monic(a.m.or(a.big_n).ok_or_else(|| missing("m"))?),
            };
            match (&a.kappa, &a.rho) {
                (Some(_), None) => reproducing_kernel(n, &point()?, &y, &hahn_params(a)?, via)?,
                (None, Some(_)) => kraw_reproducing_kernel(n, &point()?, &y, &kraw_params(a)?, via)?,
                _ => return Err(CliError::Invalid("repkernel needs exactly one of --kappa and --rho".into())),
            }
        }
    };
    Ok(value)
}

pub fn eval(a: &EvalArgs) -> Result<(), CliError> {
    match a.mode {
        Mode::Exact => {
            let v = evaluate::<Rational>(a)?;
            println!("{}", format_rational(&v));
        }
        Mode::Float => {
            let v = evaluate::<f64>(a)?;
            println!("{v:?}");
        }
    }
    Ok(())
}

fn selftest_case(name: &str, built: &FrameMatrix, profile: &ToleranceProfile) -> Result<bool, CliError> {
    let printed = fixtures::load(name)?;
    let rep = gram_vs_kernel_check(built, &ToleranceProfile::exact())?;
    let m = match_fixture(built, &printed, profile)?;
    let mut notes = Vec::new();
    for c in &m.mismatches {
        for (row, p, b) in &c.entries {
            notes.push(format!("printed col {} row {}: {p:.6} vs {b:.6}", c.printed_col + 1, row + 1));
        }
    }
    let ok = m.matched && rep.tight && rep.gram_kernel_ok == Some(true);
    println!(
        "{} {name}: built tight={} gram={:?}, printed matrix {}{}",
        if ok { "PASS" } else { "FAIL" },
        rep.tight,
        rep.gram_kernel_ok,
        if m.matched { "matched" } else { "differs" },
        if notes.is_empty() { String::new() } else { format!(" [{}]", notes.join("; ")) }
    );
    Ok(ok)
}

pub fn selftest(a: &SelftestArgs) -> Result<(), CliError> {
    let zero = vec![Rational::from_int(0); 3];
    let third = vec![Rational::new(1.into(), 3.into()); 2];
    let exact = ToleranceProfile::exact();
    let float = ToleranceProfile::float(a.tol);
    let cases: Vec<(&str, FrameMatrix, &ToleranceProfile)> = vec![
        ("xi21", build_xi_frame::<Rational>(2, 1)?, &exact),
        ("xi22", build_xi_frame::<Rational>(2, 2)?, &exact),
        ("h22", build_hahn_frame(2, 2, 2, &zero)?, &float),
        ("h23", build_hahn_frame(2, 2, 3, &zero)?, &float),
        ("h33", build_hahn_frame(2, 3, 3, &zero)?, &float),
        ("k22", build_kraw_frame(2, 2, 2, &third)?, &float),
        ("k23", build_kraw_frame(2, 2, 3, &third)?, &float),
        ("k33", build_kraw_frame(2, 3, 3, &third)?, &float),
    ];
    let mut failed = 0;
    for (name, built, profile) in &cases {
        if !selftest_case(name, built, profile)? {
            failed += 1;
        }
    }
    let printed = fixtures::load("normalized_h222")?;
    let rep = frame_operator_residual(&printed, &float)?;
    let ok = rep.tight && rep.is_normalized;
    println!(
        "{} normalized_h222: tight={} (residual {:e}), equal norms={}",
        if ok { "PASS" } else { "FAIL" },
        rep.tight,
        rep.tight_residual,
        rep.is_normalized
    );
    if !ok {
        failed += 1;
    }
    let total = cases.len() + 1;
    println!("{} of {total} checks passed", total - failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{failed} of {total} checks failed")))
    }
}
