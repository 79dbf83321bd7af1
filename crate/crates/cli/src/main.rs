mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use rectstack::concat::{
    concatenate, verify_832_gates, verify_code832, verify_colorcode_distance, verify_concatenation,
};
use rectstack::css::to_alist;
use rectstack::fixture::match_fixture_d2;
use rectstack::sim::{
    ccz_injection_circuit, teleport_chain, teleported_h_circuit, verify_ccz_injection, verify_teleported_h,
};
use rectstack::stack::{expected_ranks, redundancy_report, verify_counts};
use rectstack::surgery::{merge_2d3d, merge_stacks, sheet_for_merge, simulate_merge_mapping, split_stack};
use rectstack::transversal::{
    basis_states, ccz_phase, color_pairs, corner_structure_check, cz_phase_check_with, pairwise_overlap_check,
    PhaseTable, DEFAULT_SAMPLES,
};
use rectstack::{build_stack, Color, LatticeDims, PauliType, Report, Side, Stack};

use run::RunReport;

#[derive(Parser)]
#[command(name = "rectstack", version, about = "Build and verify stacked 3D surface codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a stack and write its codes.
    Build {
        #[command(flatten)]
        size: Size,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write only one kind of file; both by default.
        #[arg(long)]
        format: Option<Format>,
    },
    /// Run verification suites on a stack.
    Verify {
        #[command(flatten)]
        size: Size,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Merge two stacks across a boundary, or a 2D patch onto a stack.
    Surgery {
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Boundary colour r, g or b, or `2d3d` for a sheet merge.
        #[arg(long, default_value = "g")]
        axis: String,
        /// Code of the stack the sheet joins in a `2d3d` merge.
        #[arg(long, default_value = "b")]
        sheet_color: String,
        /// Also simulate the merge and split on two small patches.
        #[arg(long)]
        mapping: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concatenate a stack with the [[8,3,2]] cube code.
    Concat {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        max_weight: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the gadget circuits by statevector simulation.
    Circuits {
        /// Directory for the circuit JSON files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Size {
    #[arg(long, conflicts_with = "dims")]
    d: Option<usize>,
    /// Non-cubic box as `dx,dy,dz`.
    #[arg(long)]
    dims: Option<String>,
}

impl Size {
    fn dims(&self) -> anyhow::Result<LatticeDims> {
        match (&self.d, &self.dims) {
            (Some(d), _) => Ok(LatticeDims::cubic(*d)?),
            (None, Some(s)) => {
                let parts: Vec<usize> = s
                    .split(',')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .with_context(|| format!("bad --dims {s:?}"))?;
                let [dx, dy, dz] = parts[..] else {
                    bail!("--dims needs three values, got {s:?}");
                };
                Ok(LatticeDims::new(dx, dy, dz)?)
            }
            (None, None) => Ok(LatticeDims::cubic(2)?),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Alist,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Counts,
    Ccz,
    Cz,
    Fixture,
    Redundancy,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(run) => {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            if let Err(e) = run.emit(&mut stdout.lock(), &mut stderr.lock()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if run.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> anyhow::Result<RunReport> {
    match command {
        Command::Build { size, out, format } => build(size.dims()?, &out, format),
        Command::Verify {
            size,
            suite,
            samples,
            seed,
        } => verify(size.dims()?, suite, samples, seed),
        Command::Surgery {
            d,
            axis,
            sheet_color,
            mapping,
            out,
        } => surgery(d, &axis, &sheet_color, mapping, out.as_deref()),
        Command::Concat { d, max_weight, out } => concat(d, max_weight, out.as_deref()),
        Command::Circuits { out } => circuits(out.as_deref()),
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn code_summary(stack: &Stack) -> Report {
    let mut r = Report::new(format!("stack {}", stack.dims()));
    let n = stack.n();
    for c in Color::ALL {
        let code = stack.code(c);
        r.check(
            format!("{} parameters", code.label),
            code.k() == 1 && code.rank_x() + code.rank_z() == n - 1,
            format!(
                "[[{n},{}]], {} X and {} Z generators",
                code.k(),
                code.rank_x(),
                code.rank_z()
            ),
        );
        if let Some(d) = stack.d() {
            r.expect_eq(
                format!("{} generator split", code.label),
                (code.rank_x(), code.rank_z()),
                expected_ranks(c, d),
            );
        }
    }
    r
}

fn build(dims: LatticeDims, out: &Path, format: Option<Format>) -> anyhow::Result<RunReport> {
    let params = json!({ "dims": dims, "out": out, "format": format.map(|f| match f {
        Format::Alist => "alist",
        Format::Json => "json",
    }) });
    let mut run = RunReport::new("build", params, None);
    let stack = build_stack(dims)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut files = Vec::new();
    if format != Some(Format::Alist) {
        write(&out.join("stack.json"), &serde_json::to_string_pretty(&stack.export())?)?;
        files.push("stack.json".to_string());
    }
    if format != Some(Format::Json) {
        for c in Color::ALL {
            let code = stack.code(c);
            for (suffix, m) in [("hx", &code.hx), ("hz", &code.hz)] {
                let name = format!("{}.{suffix}.alist", code.label);
                write(&out.join(&name), &to_alist(m))?;
                files.push(name);
            }
        }
    }
    run.push(code_summary(&stack));
    run.data("n", stack.n())?;
    run.data("files", files)?;
    Ok(run)
}

fn phase_report(title: &str, table: &PhaseTable, want: impl Fn([u8; 3]) -> i8) -> Report {
    let mut r = Report::new(title);
    for bits in basis_states() {
        let e = table
            .entries
            .iter()
            .find(|e| e.bits == bits)
            .expect("table covers every basis state");
        r.check(
            format!("|{}{}{}>", bits[0], bits[1], bits[2]),
            e.phase == want(bits),
            format!("phase {:+}, {} triples", e.phase, e.checked),
        );
    }
    r
}

fn verify(dims: LatticeDims, suite: Suite, samples: usize, seed: u64) -> anyhow::Result<RunReport> {
    let params = json!({ "dims": dims, "suite": format!("{:?}", suite).to_lowercase(), "samples": samples });
    let mut run = RunReport::new("verify", params, Some(seed));
    let stack = build_stack(dims)?;
    let on = |s: Suite| suite == s || suite == Suite::All;

    if on(Suite::Counts) {
        if stack.d().is_some() {
            run.push(verify_counts(&stack));
        } else {
            run.push(code_summary(&stack));
        }
    }
    if on(Suite::Redundancy) {
        run.push(redundancy_report(&stack));
    }
    if on(Suite::Fixture) {
        if stack.d() == Some(2) {
            let mut r = Report::new("fixture");
            match match_fixture_d2(&stack) {
                Ok(perm) => {
                    r.check("stabilizer groups match under a relabelling", true, format!("{perm:?}"));
                    run.data("permutation", &perm)?;
                }
                Err(e) => {
                    r.check("stabilizer groups match under a relabelling", false, e.to_string());
                }
            }
            run.push(r);
        } else if suite == Suite::Fixture {
            bail!("the fixture exists only for d=2, got {}", stack.dims());
        }
    }
    if on(Suite::Ccz) {
        let t = ccz_phase(&stack, samples, seed)?;
        let mode = if t.exhaustive { "exhaustive" } else { "sampled" };
        run.push(phase_report(&format!("CCZ phases ({mode})"), &t, |b| {
            if b == [1, 1, 1] {
                -1
            } else {
                1
            }
        }));
        run.data("ccz_phase_table", &t)?;
        let w = pairwise_overlap_check(&stack);
        let mut r = Report::new("pairwise X overlaps");
        for (a, b) in color_pairs() {
            let mine: Vec<_> = w.iter().filter(|w| w.colors == (a, b)).collect();
            let bad = mine.iter().filter(|w| !w.member).count();
            r.check(
                format!("X_{a} & X_{b} overlaps are SC_{} Z stabilizers", Color::third(a, b)),
                bad == 0,
                format!("{} pairs, {bad} outside", mine.len()),
            );
        }
        run.push(r);
        run.push(corner_structure_check(&stack));
    }
    if on(Suite::Cz) {
        for (a, b) in color_pairs() {
            let c = Color::third(a, b);
            for side in [Side::Low, Side::High] {
                let s = stack.clone().with_canonical_x_side(c, side)?;
                let t = cz_phase_check_with(&s, (a, b), side, samples, seed)?;
                let title = format!("CZ_{a}{b} on the {side:?} {c} boundary");
                run.push(phase_report(&title, &t, |bits| {
                    if bits[a.index()] == 1 && bits[b.index()] == 1 {
                        -1
                    } else {
                        1
                    }
                }));
            }
        }
    }
    Ok(run)
}

fn surgery(d: usize, axis: &str, sheet_color: &str, mapping: bool, out: Option<&Path>) -> anyhow::Result<RunReport> {
    let params = json!({ "d": d, "axis": axis, "sheet_color": sheet_color, "mapping": mapping });
    let mut run = RunReport::new("surgery", params, None);
    let stack = build_stack(LatticeDims::cubic(d)?)?;
    if axis == "2d3d" {
        let color: Color = sheet_color.parse()?;
        let sheet = sheet_for_merge(&stack, color)?;
        let m = merge_2d3d(&sheet, &stack, color)?;
        run.data("ancillas", m.ancillas.len())?;
        run.data("new_z", m.new_z.len())?;
        run.data("modified_stack_x", &m.modified_stack_x)?;
        run.data("junction", &m.junction)?;
        if let Some(out) = out {
            write(out, &serde_json::to_string_pretty(&m.merged.bundle())?)?;
        }
        run.push(m.report);
    } else {
        let color: Color = axis.parse()?;
        let m = merge_stacks(&stack, &stack, color)?;
        let split = split_stack(&m)?;
        run.data("new_qubits", m.new_qubits.len())?;
        for delta in &m.deltas {
            run.data(
                format!("{} delta", delta.label),
                json!({
                    "merge_type": delta.merge_type,
                    "new_x": delta.new_x.len(),
                    "new_z": delta.new_z.len(),
                    "modified_x": delta.modified_x.len(),
                    "modified_z": delta.modified_z.len(),
                    "dropped": delta.dropped,
                    "new_independent": delta.new_independent,
                    "k": delta.k,
                }),
            )?;
        }
        if let Some(out) = out {
            write(out, &serde_json::to_string_pretty(&m.merged.export())?)?;
        }
        run.push(m.report);
        run.push(split.report);
    }
    if mapping {
        for ty in [PauliType::Z, PauliType::X] {
            run.timed(|| simulate_merge_mapping(2, ty))?;
        }
    }
    Ok(run)
}

fn concat(d: usize, max_weight: usize, out: Option<&Path>) -> anyhow::Result<RunReport> {
    let params = json!({ "d": d, "max_weight": max_weight });
    let mut run = RunReport::new("concat", params, None);
    let stack = build_stack(LatticeDims::cubic(d)?)?;
    run.timed(verify_code832)?;
    let cc = concatenate(&stack)?;
    run.push(verify_concatenation(&stack, &cc));
    run.timed(|| verify_colorcode_distance(&cc, max_weight))?;
    run.data(
        "code",
        json!({ "n": cc.code.n, "k": cc.code.k(), "generators": cc.code.rank_x() + cc.code.rank_z() }),
    )?;
    if let Some(out) = out {
        write(out, &serde_json::to_string_pretty(&cc.code.bundle())?)?;
    }
    Ok(run)
}

fn circuits(out: Option<&Path>) -> anyhow::Result<RunReport> {
    let mut run = RunReport::new("circuits", json!({}), None);
    run.timed(verify_teleported_h)?;
    run.timed(verify_832_gates)?;
    run.timed(verify_ccz_injection)?;
    if let Some(out) = out {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let all = [
            ("teleported_h.json", teleported_h_circuit()),
            ("teleport_chain_rgbr.json", teleport_chain(&[0, 1, 2, 0])),
            ("encoder_832.json", rectstack::concat::encoder_circuit()),
            ("ccz_injection.json", ccz_injection_circuit()),
        ];
        for (name, c) in all {
            write(&out.join(name), &serde_json::to_string_pretty(&c)?)?;
        }
    }
    Ok(run)
}
