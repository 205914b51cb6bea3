"""Config-driven experiment runner.

Subcommands:

    run    --config cfg.json --out DIR [--trials N] [--iters N]
           [--seed S] [--strategy consensus|atc|cta]
    theory --config cfg.json
    preset NAME --out cfg.json          (fig4 | partial_obs | topology_invariance)

Exit codes: 0 success, 2 divergence or unstable step size, 3 config error.
All randomness derives from the single top-level seed in the config; the
schema is documented in the README.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import model as model_mod
from . import policy as policy_mod
from . import sim as sim_mod
from . import theory as theory_mod
from . import topology as topology_mod
from .errors import AdaptNetError, ConfigError, DivergenceError

PRESET_NAMES = ("fig4", "partial_obs", "topology_invariance")


# --------------------------------------------------------------------------
# config -> objects
# --------------------------------------------------------------------------

def _build_topology(spec: dict) -> topology_mod.Topology:
    kind = spec.get("kind")
    if kind == "ring":
        return topology_mod.ring(int(spec["n"]))
    if kind == "random_geometric":
        return topology_mod.random_geometric(
            int(spec["n"]), float(spec["radius"]), int(spec["seed"]))
    if kind == "edges":
        return topology_mod.from_edges(
            int(spec["n"]), [tuple(e) for e in spec["edges"]])
    raise ConfigError(f"unknown topology kind {kind!r}")


def _build_w_star(spec, m: int) -> np.ndarray:
    if isinstance(spec, dict):
        if spec.get("kind") != "seeded_unit":
            raise ConfigError(f"unknown w_star spec {spec!r}")
        v = np.random.default_rng(int(spec["seed"])).standard_normal(m)
        return v / np.linalg.norm(v)
    v = np.asarray(spec, dtype=float)
    if v.shape != (m,):
        raise ConfigError(f"w_star must have {m} entries")
    return v


def _build_model(spec: dict, n: int) -> model_mod.LinearModel:
    m = int(spec["m"])
    w_star = _build_w_star(spec["w_star"], m)
    r_spec = spec.get("r_u", "identity")
    if isinstance(r_spec, str):
        if r_spec != "identity":
            raise ConfigError(f"unknown r_u spec {r_spec!r}")
        r_u = np.broadcast_to(np.eye(m), (n, m, m)).copy()
    else:
        r_u = np.asarray(r_spec, dtype=float)
        if r_u.ndim == 2:
            r_u = np.broadcast_to(r_u, (n, m, m)).copy()
    noise = spec["sigma_n2"]
    if isinstance(noise, dict):
        if noise.get("kind") != "log_uniform":
            raise ConfigError(f"unknown sigma_n2 spec {noise!r}")
        sigma_n2 = model_mod.noise_profile(
            n, int(noise["seed"]), float(noise.get("lo", 1e-3)),
            float(noise.get("hi", 1e-1)), bool(noise.get("anchor", True)))
    else:
        sigma_n2 = np.asarray(noise, dtype=float)
    return model_mod.LinearModel(w_star=w_star, r_u=r_u, sigma_n2=sigma_n2)


def _build_policy(spec: dict, topo: topology_mod.Topology,
                  model: model_mod.LinearModel,
                  mu_max: float) -> policy_mod.CombinationPolicy:
    kind = spec.get("kind", "atc")
    weights = spec.get("weights", "metropolis")
    if weights == "metropolis":
        a = policy_mod.build_metropolis(topo)
    elif weights == "uniform":
        a = policy_mod.build_uniform_averaging(topo)
    elif weights == "hastings":
        target = spec.get("target")
        if target == "optimal":
            target = theory_mod.optimal_theta_for_model(model, mu_max).theta
        else:
            target = np.asarray(target, dtype=float)
        a = policy_mod.build_hastings(topo, target)
    else:
        raise ConfigError(f"unknown weight rule {weights!r}")
    return policy_mod.assemble(kind, a, support=topo)


def build_experiment(cfg: dict):
    """Resolve a config dict into (model, policy, perron, sim config)."""
    try:
        topo = _build_topology(cfg["topology"])
        model = _build_model(cfg["model"], topo.n)
        mus = np.broadcast_to(np.asarray(cfg["mu"], dtype=float),
                              (topo.n,)).copy()
        policy = _build_policy(cfg.get("policy", {}), topo, model,
                               float(mus.max()))
        perron = policy_mod.build_perron(policy, mus)
        sim_config = sim_mod.SimConfig(
            trials=int(cfg.get("trials", 100)),
            iters=int(cfg.get("iters", 10_000)),
            seed=int(cfg.get("seed", 0)),
            policy=policy,
            model=model,
            mus=mus,
            steady_window=float(cfg.get("steady_window", 0.1)),
            paired_streams=bool(cfg.get("paired_streams", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return model, policy, perron, sim_config


def theory_block(cfg: dict) -> dict:
    """Theory report(s) for a config; handles comparison variants."""
    variants = cfg.get("compare_topologies")
    if not variants:
        model, policy, perron, _ = build_experiment(cfg)
        return theory_mod.report_to_json(
            theory_mod.build_report(model, policy, perron))
    blocks = []
    for variant in variants:
        sub = dict(cfg)
        sub["topology"] = variant
        sub.pop("compare_topologies", None)
        model, policy, perron, _ = build_experiment(sub)
        blocks.append({
            "topology": variant,
            "theory": theory_mod.report_to_json(
                theory_mod.build_report(model, policy, perron)),
        })
    msds = [b["theory"]["msd_first_order"] for b in blocks]
    return {
        "variants": blocks,
        "max_abs_msd_delta": float(max(msds) - min(msds)),
    }


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _dump(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_run(config_path: str, out_dir: str, trials=None, iters=None,
            seed=None, strategy=None) -> int:
    try:
        cfg = _load_config(config_path)
        if trials is not None:
            cfg["trials"] = trials
        if iters is not None:
            cfg["iters"] = iters
        if seed is not None:
            cfg["seed"] = seed
        if strategy is not None:
            cfg.setdefault("policy", {})["kind"] = strategy
        theory = theory_block(cfg)
        plain = theory if "variants" not in theory else theory["variants"][0]["theory"]
        model, policy, perron, sim_config = build_experiment(cfg)
        if perron.mu_max >= plain["mu_bound"] and not cfg.get("allow_unstable"):
            print(
                f"step size {perron.mu_max:.3e} is not below the stability "
                f"bound {plain['mu_bound']:.3e}; set allow_unstable to force",
                file=sys.stderr,
            )
            return 2
    except (AdaptNetError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3

    try:
        curves = sim_mod.run(sim_config)
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sim_mod.export_csv(curves, out / "curves.csv")
    (out / "theory.json").write_text(_dump(theory))
    report = {
        "config": cfg,
        "policy": policy_mod.policy_to_json(policy, perron),
        "theory": theory,
        "summary": sim_mod.run_summary(curves, plain),
    }
    (out / "report.json").write_text(_dump(report))
    print(f"wrote {out / 'curves.csv'}, {out / 'report.json'}, "
          f"{out / 'theory.json'}")
    return 0


def cmd_theory(config_path: str) -> int:
    try:
        cfg = _load_config(config_path)
        block = theory_block(cfg)
        plain = block if "variants" not in block else block["variants"][0]["theory"]
        _, _, perron, _ = build_experiment(cfg)
    except (AdaptNetError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    if perron.mu_max >= plain["mu_bound"] and not cfg.get("allow_unstable"):
        print(
            f"step size {perron.mu_max:.3e} is not below the stability "
            f"bound {plain['mu_bound']:.3e}",
            file=sys.stderr,
        )
        return 2
    sys.stdout.write(_dump(block))
    return 0


def _preset_config(name: str) -> dict:
    if name == "fig4":
        return {
            "seed": 2024,
            "topology": {"kind": "random_geometric", "n": 30,
                         "radius": 0.35, "seed": 42},
            "model": {
                "m": 10,
                "w_star": {"kind": "seeded_unit", "seed": 5},
                "r_u": "identity",
                "sigma_n2": {"kind": "log_uniform", "lo": 1e-3, "hi": 1e-1,
                             "seed": 11, "anchor": True},
            },
            "policy": {"kind": "atc", "weights": "hastings",
                       "target": "optimal"},
            "mu": 5e-4,
            "trials": 200,
            "iters": 30_000,
            "steady_window": 0.1,
            "paired_streams": True,
        }
    if name == "partial_obs":
        return {
            "seed": 7,
            "topology": {"kind": "ring", "n": 2},
            "model": {
                "m": 2,
                "w_star": {"kind": "seeded_unit", "seed": 3},
                "r_u": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
                "sigma_n2": [0.01, 0.04],
            },
            "policy": {"kind": "atc", "weights": "metropolis"},
            "mu": 5e-4,
            "trials": 200,
            "iters": 80_000,
            "steady_window": 0.1,
            "paired_streams": True,
        }
    if name == "topology_invariance":
        rng = np.random.default_rng(9)
        target = 0.8 + 0.4 * rng.random(10)
        target /= target.sum()
        ring_spec = {"kind": "ring", "n": 10}
        rgg_spec = {"kind": "random_geometric", "n": 10,
                    "radius": 0.5, "seed": 21}
        return {
            "seed": 5,
            "topology": ring_spec,
            "compare_topologies": [ring_spec, rgg_spec],
            "model": {
                "m": 5,
                "w_star": {"kind": "seeded_unit", "seed": 3},
                "r_u": "identity",
                "sigma_n2": {"kind": "log_uniform", "lo": 1e-3, "hi": 1e-1,
                             "seed": 7, "anchor": True},
            },
            "policy": {"kind": "atc", "weights": "hastings",
                       "target": target.tolist()},
            "mu": 5e-4,
            "trials": 200,
            "iters": 40_000,
            "steady_window": 0.1,
            "paired_streams": True,
        }
    raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")


def cmd_preset(name: str, out_path: str) -> int:
    try:
        cfg = _preset_config(name)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    Path(out_path).write_text(_dump(cfg))
    print(f"wrote {out_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="adaptnet",
        description="Distributed-adaptation experiments: simulate learning "
                    "curves and check them against closed-form predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate and write curves + reports")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.add_argument("--trials", type=int)
    p_run.add_argument("--iters", type=int)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--strategy", choices=policy_mod.PRESETS)

    p_theory = sub.add_parser("theory", help="print the closed-form report")
    p_theory.add_argument("--config", required=True)

    p_preset = sub.add_parser("preset", help="write a ready-made config")
    p_preset.add_argument("name")
    p_preset.add_argument("--out", required=True)

    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args.config, args.out, trials=args.trials,
                       iters=args.iters, seed=args.seed,
                       strategy=args.strategy)
    if args.command == "theory":
        return cmd_theory(args.config)
    return cmd_preset(args.name, args.out)


if __name__ == "__main__":
    sys.exit(main())
