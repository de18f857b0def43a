"""Command line entry point: evolve, run, experiment, stats."""
from __future__ import annotations

import dataclasses
import logging
import os
import sys

import click

from . import config as config_mod
from . import immune
from .data import bundled_sequence
from .evolution import evolve as evolve_sequence
from .genome import read_sequence, write_sequence
from .harness import experiment as ex
from .harness.control import ImmuneController, run_episode, write_selections, write_trace
from .world import BLOCK, MAZE, WORLD_KINDS, generate_world, world_scale


def _out(cfg: config_mod.RunConfig, path: str) -> str:
    """Relative output paths land in the configured output directory."""
    full = path if os.path.isabs(path) else os.path.join(cfg.output_dir, path)
    os.makedirs(os.path.dirname(full) or ".", exist_ok=True)
    return full


def _load_sequence(path: str | None, cfg: config_mod.RunConfig, kind: str, seed: int):
    if path is None:
        return bundled_sequence(kind)
    seq = read_sequence(path)
    if seq.costs is None:
        click.echo(f"{path}: no per-set costs, calibrating on {kind}", err=True)
        costs = ex.calibrate_costs(seq, cfg.experiment.profile, kind, seed, cfg.episode)
        seq = dataclasses.replace(seq, costs=costs)
    return seq


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="INI file with [ga], [immune], [episode], [experiment] ... sections.")
@click.option("-v", "--verbose", count=True)
@click.pass_context
def main(ctx, config_path, verbose):
    logging.basicConfig(level=logging.WARNING - 10 * verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        ctx.obj = config_mod.load(config_path)
    except config_mod.ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


@main.command()
@click.option("--world-kind", type=click.Choice(WORLD_KINDS), default=BLOCK, show_default=True)
@click.option("--profile", default="epuck", show_default=True, help="Platform the GA runs on.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default="sequence.txt", show_default=True)
@click.option("--log", "log_path", default="generations.csv", show_default=True)
@click.option("--workers", type=int, default=None, help="Processes for independent populations.")
@click.pass_obj
def evolve(cfg, world_kind, profile, seed, out, log_path, workers):
    """Evolve isolated populations into a genetic-sequence file."""
    ga = cfg.ga if workers is None else dataclasses.replace(cfg.ga, workers=workers)
    seq = evolve_sequence(ga, world_kind, seed, cfg.profile(profile), cfg.episode, _out(cfg, log_path))
    path = _out(cfg, out)
    write_sequence(path, seq)
    click.echo(f"wrote {path}")
    for k, (t, c) in enumerate(seq.costs):
        click.echo(f"set {k}: time {t:7.1f}  collisions {c:7.1f}")


@main.command()
@click.option("--world-kind", type=click.Choice(WORLD_KINDS), default=MAZE, show_default=True)
@click.option("--profile", default="pioneer_sim", show_default=True)
@click.option("--sequence", "seq_path", type=click.Path(exists=True, dir_okay=False),
              help="Genetic-sequence file. Defaults to the bundled one for the world kind.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--world-seed", type=int, default=None, help="Defaults to --seed.")
@click.option("--idiotypic", type=click.Choice(["on", "off"]), default="on", show_default=True)
@click.option("--trace", "trace_path", default=None, help="Per-tick pose CSV.")
@click.option("--selections", "sel_path", default=None, help="Per-selection immune report CSV.")
@click.pass_obj
def run(cfg, world_kind, profile, seq_path, seed, world_seed, idiotypic, trace_path, sel_path):
    """Run a single episode and print its result."""
    prof = cfg.profile(profile)
    seq = _load_sequence(seq_path, cfg, world_kind, seed)
    icfg = cfg.immune.with_(idiotypic=cfg.immune.idiotypic and idiotypic == "on")
    world = generate_world(world_kind, seed if world_seed is None else world_seed,
                           world_scale(prof), prof.body_radius)
    ctl = ImmuneController(immune.build_repertoire(seq, icfg), seq, icfg)
    res = run_episode(world, prof, ctl, cfg.episode, seed, trace=trace_path is not None)
    status = "FAILED" if res.failed else "reached goal"
    click.echo(f"{world_kind} on {prof.name}: {status} in {res.time:.1f} s, "
               f"{res.collisions} collisions, {res.contacts} contacts, "
               f"{res.selections} selections, difference rate {res.difference_rate:.3f}")
    if trace_path:
        write_trace(_out(cfg, trace_path), res.trace)
    if sel_path:
        write_selections(_out(cfg, sel_path), ctl.history, res.selection_ticks)


@main.command()
@click.option("--sequence", "seqs", multiple=True,
              help="PATH for every world, or KIND=PATH per world kind (repeatable). "
                   "Worlds without one use the bundled sequence.")
@click.option("--runs", type=int, default=None, help="Paired runs per world.")
@click.option("--worlds", default=None, help="Comma-separated world kinds.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--workers", type=int, default=None)
@click.option("--out", default="experiment", show_default=True, help="Output file prefix.")
@click.pass_obj
def experiment(cfg, seqs, runs, worlds, seed, workers, out):
    """Paired idiotypic vs RL-only batch with a statistical report."""
    changes = {k: v for k, v in (("runs", runs), ("master_seed", seed), ("workers", workers))
               if v is not None}
    if worlds:
        changes["worlds"] = tuple(w.strip() for w in worlds.split(","))
    ecfg = dataclasses.replace(cfg.experiment, **changes)
    for w in ecfg.worlds:
        if w not in WORLD_KINDS:
            raise click.BadParameter(f"unknown world kind {w!r}", param_hint="--worlds")
    paths = {}
    for s in seqs:
        kind, sep, path = s.partition("=")
        if not sep:
            paths.update({w: s for w in ecfg.worlds})
        else:
            paths[kind] = path
    unknown = set(paths) - set(ecfg.worlds)
    if unknown:
        raise click.BadParameter(f"sequence for a world not in the batch: {sorted(unknown)}",
                                 param_hint="--sequence")
    loaded = {kind: _load_sequence(paths.get(kind), cfg, kind, ecfg.master_seed)
              for kind in ecfg.worlds}
    report = ex.run_experiment(loaded, ecfg)
    records = report.records
    ep, rp = _out(cfg, out + "_episodes.csv"), _out(cfg, out + "_report.csv")
    ex.write_episodes(ep, records)
    with open(rp, "w") as fh:
        fh.write(report.to_csv())
    click.echo(report.table())
    click.echo(f"wrote {ep} and {rp}")


@main.command()
@click.argument("episodes", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, help="Write the report CSV here as well.")
@click.pass_obj
def stats(cfg, episodes, out):
    """Recompute the comparison report from a stored episode CSV."""
    report = ex.report_from_records(ex.read_episodes(episodes))
    click.echo(report.table())
    if out:
        with open(_out(cfg, out), "w") as fh:
            fh.write(report.to_csv())


if __name__ == "__main__":
    sys.exit(main())
