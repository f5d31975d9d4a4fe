use std::process::{Command, Output};

use fgsymp_cli::csv::Table;

const MHH: &[&str] = &[
    "--system",
    "mhh",
    "--ic",
    "x=0,y=-2.02,py=0",
    "--energy",
    "1/120",
    "--closure",
    "px",
];

fn fgsymp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgsymp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(cmd: &str, base: &[&str], extra: &[&str]) -> Output {
    let mut args = vec![cmd.to_string()];
    args.extend(with(base, extra));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    fgsymp(&refs)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn integrate_writes_canonical_csv() {
    let o = run(
        "integrate",
        MHH,
        &["--scheme", "omf4gp", "--tau", "0.1", "--steps", "20"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("t,x,y,px,py,H,dH\n"));
    assert!(!text.contains('\r'));
    let table = Table::parse(&text).unwrap();
    assert_eq!(table.rows.len(), 21);
    let dh = table.column("dH").unwrap();
    assert_eq!(dh[0], 0.0);
    assert!(dh.iter().all(|d| d.abs() < 1e-5));
    let px = table.column("px").unwrap();
    assert!((px[0] - 2.1753197101998958).abs() < 1e-15);
    // re-read and re-emitted output is byte-identical
    assert_eq!(table.to_csv(), text);
}

#[test]
fn output_file_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("traj.csv");
    std::fs::write(
        &cfg,
        "# long-run orbit\nsystem = mhh\nscheme = chin4\ntau = 1/10\nsteps = 50\n\
         ic = x=0,y=-2.02,py=0\nenergy = 1/120\nclosure = px\n",
    )
    .unwrap();
    let o = fgsymp(&[
        "integrate",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "4",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(Table::parse(&text).unwrap().rows.len(), 5);
}

#[test]
fn usage_errors_exit_2_and_name_the_field() {
    let o = run(
        "integrate",
        MHH,
        &["--scheme", "omf4gp", "--tau", "0.1", "--steps", "0"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`steps`"), "{}", stderr(&o));

    let o = run(
        "integrate",
        MHH,
        &["--scheme", "leapfrog", "--tau", "0.1", "--steps", "5"],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("`scheme`") && err.contains("verlet2") && err.contains("omf4gp"),
        "{err}"
    );

    let o = run(
        "integrate",
        MHH,
        &["--scheme", "fr4", "--tau", "0", "--steps", "5"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`tau`"));

    let o = run(
        "integrate",
        &[
            "--system",
            "mhh",
            "--ic",
            "y=-0.0001",
            "--energy",
            "1/120",
            "--closure",
            "px",
        ],
        &["--scheme", "fr4", "--tau", "0.1", "--steps", "5"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`energy`"));

    let o = run(
        "zero-one",
        MHH,
        &["--scheme", "fr4", "--tau", "0.1", "--c", "random"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`seed`"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "timestep = 0.1\n").unwrap();
    let o = fgsymp(&["integrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`timestep`"));
}

#[test]
fn numerical_failure_exits_3_with_partial_output() {
    // radial plunge into the spring pendulum's origin
    let o = fgsymp(&[
        "integrate",
        "--system",
        "spring",
        "--ic",
        "r=0.5,pr=-50",
        "--scheme",
        "verlet2",
        "--tau",
        "0.1",
        "--steps",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let table = Table::parse(&stdout(&o)).unwrap();
    assert!(!table.rows.is_empty() && table.rows.len() < 101);
}

#[test]
fn tables_check_exit_codes() {
    let spring = ["--table", "spring", "--check"];
    let o = run("tables", &spring, &["--scheme", "omf4gp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = Table::parse(&stdout(&o)).unwrap();
    assert_eq!(table.rows.len(), 2);
    // RK4's absolute energy error does not reach the expected order
    let o = run("tables", &spring, &["--scheme", "rk4"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("rk4"));
    assert!(stdout(&o).contains("false"));
}

#[test]
fn scan_is_independent_of_worker_count() {
    let base = [
        "--system",
        "spring",
        "--ic",
        "r=1.15",
        "--energy",
        "1/12",
        "--closure",
        "pphi",
        "--scheme",
        "omf4gp",
        "--tau",
        "0.1",
        "--t-end",
        "50",
        "--var",
        "phi",
        "--start",
        "0",
        "--stop",
        "2.5",
        "--count",
        "11",
        "--unit",
        "pi",
    ];
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let one = run("scan", &base, &["--workers", "1"]);
    let two = run("scan", &base, &["--workers", "2"]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(strip(&one), strip(&two));
    let text = stdout(&one);
    assert!(text.starts_with("swept_value,indicator,classification,seconds\n"));
    assert!(text.contains(",infeasible,"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn detcheck_symplectic_floor() {
    let o = run(
        "detcheck",
        &[
            "--system",
            "mhh",
            "--ic",
            "y=-0.988",
            "--energy",
            "1/120",
            "--closure",
            "px",
        ],
        &["--scheme", "grad2", "--tau", "0.01", "--t-end", "300"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = Table::parse(&stdout(&o)).unwrap();
    let d = table.column("det_minus_1").unwrap();
    assert_eq!(d.len(), 301);
    assert!(d.iter().all(|v| v.abs() <= 1e-8));
}

#[test]
fn convergence_slope_row() {
    let o = run("convergence", MHH, &["--scheme", "chin4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let last = text.lines().last().unwrap();
    let slope: f64 = last.strip_prefix("slope,").unwrap().parse().unwrap();
    assert!((slope - 4.0).abs() <= 0.3, "{slope}");
}

#[test]
fn fli_and_zero_one_outputs() {
    let o = run(
        "fli",
        &[
            "--system",
            "mhh",
            "--ic",
            "y=-1.108",
            "--energy",
            "1/120",
            "--closure",
            "px",
        ],
        &[
            "--scheme",
            "fr4",
            "--tau",
            "0.1",
            "--t-end",
            "3000",
            "--sample-every",
            "10000",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let fli = Table::parse(&stdout(&o)).unwrap().column("fli").unwrap();
    assert_eq!(fli.len(), 4);
    assert!(*fli.last().unwrap() >= 15.0);

    let o = run(
        "zero-one",
        &[
            "--system",
            "spring",
            "--ic",
            "r=1.15,phi=0.05pi",
            "--energy",
            "1/12",
            "--closure",
            "pphi",
        ],
        &[
            "--scheme", "omf4gp", "--tau", "0.1", "--t-max", "100", "--window", "2000", "--c",
            "random", "--seed", "7",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let again = run(
        "zero-one",
        &[
            "--system",
            "spring",
            "--ic",
            "r=1.15,phi=0.05pi",
            "--energy",
            "1/12",
            "--closure",
            "pphi",
        ],
        &[
            "--scheme", "omf4gp", "--tau", "0.1", "--t-max", "100", "--window", "2000", "--c",
            "random", "--seed", "7",
        ],
    );
    assert_eq!(o.stdout, again.stdout);
    assert!(stdout(&o).lines().last().unwrap().starts_with("lambda,"));
}

#[test]
fn poincare_points_lie_on_the_section() {
    let o = run(
        "poincare",
        MHH,
        &["--scheme", "omf4gp", "--tau", "0.1", "--t-end", "500"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = Table::parse(&stdout(&o)).unwrap();
    assert!(table.rows.len() > 10);
    assert!(table.column("x").unwrap().iter().all(|x| x.abs() < 1e-9));
    assert!(table.column("px").unwrap().iter().all(|p| *p > 0.0));
}
