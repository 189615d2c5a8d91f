# -*- coding: utf-8 -*-
#
# Copyright (c) 2024 The riskbn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 model error, 3 inference error.
"""

import functools
import json
import logging
import sys

import click

from riskbn import __version__
from riskbn._core.dbn import TwoSliceNetwork, forward_filter
from riskbn._core.decision import DwellGuard, GuardedRecommender, load_decision_network, loss_probability_above
from riskbn._core.errors import InvalidQuery, ModelError, RiskbnError, UsageError
from riskbn._core.hazid import load_pha, rank_hazards, render_pha, summarize
from riskbn._core.inference import Query, posterior_enumeration, posterior_lw, posterior_ve
from riskbn._core.models import SCENARIOS, load_failure_rates, scenario
from riskbn._core.network import Evidence, load_network, read_model, unchecked_network_from_dict, validate
from riskbn._core.options import options
from riskbn._core.report import emit_tornado_svg, tornado_csv, trajectory_csv, write_text
from riskbn._core.sensitivity import SensitivityTarget, node_importance, tornado

logger = logging.getLogger(__name__)

CONTEXT_SETTINGS = {"help_option_names": ["-h", "--help"]}


def _dumps(document):
    return json.dumps(document, indent=2) + "\n"


def _emit(text, output):
    if output:
        write_text(text, output)
    else:
        click.echo(text, nl=False)


def source_options(f):
    """--model / --scenario / --output, shared by every subcommand."""

    @click.option("--model", type=click.Path(dir_okay=False), default=None, help="JSON model file.")
    @click.option("--scenario", "scenario_label", type=click.Choice(SCENARIOS), default=None, help="Bundled scenario.")
    @click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write to a file.")
    @functools.wraps(f)
    def wrapper(*args, model, scenario_label, **kwargs):
        if (model is None) == (scenario_label is None):
            raise UsageError("Give exactly one of --model and --scenario")
        return f(*args, source=(model, scenario_label), **kwargs)

    return wrapper


def _static(source):
    model, label = source
    return load_network(model) if model else scenario(label).static


def _evidence(text):
    return Evidence.parse(text) if text else Evidence()


@click.group(context_settings=CONTEXT_SETTINGS)
@click.option("-v", "--verbose", is_flag=True, help="Log debug messages to standard error.")
@click.version_option(version=__version__, prog_name="riskbn")
def cli(verbose):
    """Bayesian-network risk assessment for underwater robot missions."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@source_options
@click.option("-e", "--evidence", default=None, help="Observations, e.g. leakage=TRUE,dvl_failure=FALSE.")
@click.option("-t", "--target", "targets", default=None, help="Comma-separated nodes (default: all unobserved).")
@click.option("--method", type=click.Choice(["ve", "enumeration", "lw"]), default="ve", show_default=True)
@click.option("--samples", type=int, default=None, help="Likelihood weighting samples.")
@click.option("--seed", type=int, default=None, help="Sampler seed (default: RISKBN_SEED or 0).")
def query(source, output, evidence, targets, method, samples, seed):
    """Posterior marginals of the target nodes."""
    network = _static(source)
    evidence = _evidence(evidence)
    if targets:
        names = tuple(name.strip() for name in targets.split(",") if name.strip())
    else:
        names = tuple(name for name in network.names if name not in evidence)
    question = Query(names, evidence)
    if method == "ve":
        posterior = posterior_ve(network, question)
    elif method == "enumeration":
        posterior = posterior_enumeration(network, question)
    else:
        samples = samples if samples is not None else options.get_option("sampling.samples")
        seed = seed if seed is not None else options.get_option("sampling.seed")
        posterior = posterior_lw(network, question, samples, seed)
    document = {
        "method": method,
        "evidence": dict(evidence),
        "p_evidence": posterior.evidence_probability,
        "posterior": posterior.to_dict(),
    }
    if posterior.stderr is not None:
        document["stderr"] = {
            node: dict(zip(posterior.states[node], map(float, errors))) for node, errors in posterior.stderr.items()
        }
    _emit(_dumps(document), output)


@cli.command()
@source_options
@click.option("--steps", type=int, required=True, help="Number of time slices.")
@click.option("--step-hours", type=float, default=None, help="Slice duration in hours (default: 1).")
@click.option("--monitor", default=None, help="Comma-separated nodes to report.")
@click.option("--rates", type=click.Path(exists=True, dir_okay=False), default=None, help="Failure rate CSV.")
@click.option("--allow-long", is_flag=True, help="Accept more steps than the 1000-step cap.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.option("--html", type=click.Path(dir_okay=False), default=None, help="Also save an interactive chart.")
def dbn(source, output, steps, step_hours, monitor, rates, allow_long, fmt, html):
    """Per-step probabilities of the monitored nodes."""
    model, label = source
    if model:
        rates = load_failure_rates(rates)
        tsn = TwoSliceNetwork.from_failure_rates(load_network(model), rates, step_hours)
    else:
        tsn = scenario(label, step_hours).dynamic
    monitored = [name.strip() for name in monitor.split(",")] if monitor else None
    trajectory = forward_filter(tsn, steps, monitored, allow_long)
    if fmt == "csv":
        text = trajectory_csv(trajectory)
    else:
        text = _dumps(
            {
                "step_hours": trajectory.step_hours,
                "steps": trajectory.steps,
                "trajectory": {
                    node: {state: trajectory.probability(node, state).tolist() for state in trajectory.states[node]}
                    for node in trajectory.monitored
                },
            }
        )
    _emit(text, output)
    if html:
        from riskbn._core.chart import TrajectoryChart

        TrajectoryChart.from_trajectory(trajectory, title=tsn.base.name).save(html)


@cli.command()
@source_options
@click.option("-t", "--target", default="loss_of_eely=TRUE", show_default=True, help="NODE=STATE to explain.")
@click.option("-e", "--evidence", default=None, help="Observations, e.g. leakage=TRUE.")
@click.option("--sweep", type=float, default=None, help="Relative sweep half-width (default: 0.1).")
@click.option("--points", type=int, default=None, help="Odd number of sweep points (default: 11).")
@click.option("--roots-only", is_flag=True, help="Only sweep root node priors.")
@click.option("--top", type=int, default=None, help="Keep the first N entries.")
@click.option("--nodes", "by_node", is_flag=True, help="Report the largest spread per node instead.")
@click.option("--svg", type=click.Path(dir_okay=False), default=None, help="Also write a tornado SVG.")
@click.option("--html", type=click.Path(dir_okay=False), default=None, help="Also save an interactive chart.")
def sensitivity(source, output, target, evidence, sweep, points, roots_only, top, by_node, svg, html):
    """Rank CPT entries by how much they swing the target posterior."""
    network = _static(source)
    goal = SensitivityTarget.parse(target, _evidence(evidence))
    entries = tornado(network, goal, sweep, points, roots_only)
    shown = entries[:top] if top else entries
    if by_node:
        ranked = node_importance(entries)
        ranked = ranked[:top] if top else ranked
        text = "rank,node,spread\n" + "".join(
            "{rank},{node},{spread:.12g}\n".format(rank=rank, node=node, spread=spread)
            for rank, (node, spread) in enumerate(ranked, start=1)
        )
    else:
        text = tornado_csv(shown)
    _emit(text, output)
    if svg:
        emit_tornado_svg(shown, svg)
    if html:
        from riskbn._core.chart import TornadoChart

        TornadoChart(shown).save(html)


@cli.command()
@source_options
@click.option(
    "-e", "--evidence", "evidence_stream", multiple=True, help="Observations; repeat for consecutive decision calls."
)
@click.option("--guard", type=int, default=None, help="Dwell guard in calls (default: 3).")
@click.option("--abort-above", type=float, default=None, help="Force c_s=abort when P(loss_of_eely) is higher.")
def decide(source, output, evidence_stream, guard, abort_above):
    """Recommend decision alternatives by expected utility."""
    model, label = source
    dn = load_decision_network(model) if model else scenario(label).decision
    overrides = []
    if abort_above is not None:
        if "c_s" not in dn.names:
            raise InvalidQuery("--abort-above needs a 'c_s' decision")
        overrides.append(loss_probability_above(abort_above, {"c_s": "abort"}))
    recommender = GuardedRecommender(dn, DwellGuard(guard) if guard is not None else None, overrides)
    policies = [recommender.recommend(_evidence(text)).to_dict() for text in (evidence_stream or [None])]
    _emit(_dumps(policies[0] if len(policies) == 1 else policies), output)


@cli.command()
@click.option("--scenario", "scenario_label", type=click.Choice(SCENARIOS), default=None, help="Bundled scenario.")
@click.option("--pha", type=click.Path(exists=True, dir_okay=False), default=None, help="PHA CSV file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "markdown", "md"]), default="csv", show_default=True)
@click.option("--rank", "ranked", is_flag=True, help="Sort by descending rpn.")
@click.option("--summary", is_flag=True, help="Count records per rpn value instead.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write to a file.")
def hazid(scenario_label, pha, fmt, ranked, summary, output):
    """Render a PHA sheet with rpn scores."""
    if (pha is None) == (scenario_label is None):
        raise UsageError("Give exactly one of --pha and --scenario")
    records = list(scenario(scenario_label).hazards) if scenario_label else load_pha(pha)
    if ranked:
        records = rank_hazards(records)
    if summary:
        text = summarize(records).to_csv(lineterminator="\n")
    else:
        text = render_pha(records, fmt)
    _emit(text, output)


@cli.command(name="validate")
@source_options
@click.pass_context
def validate_command(ctx, source, output):
    """Check a model and list every broken invariant."""
    model, label = source
    if model:
        document = read_model(model)
        try:
            violations = validate(unchecked_network_from_dict(document))
        except ModelError as e:
            violations = [{"kind": type(e).__name__, "node": getattr(e, "node", None), "message": str(e)}]
    else:
        violations = validate(scenario(label).static)
    report = [
        v
        if isinstance(v, dict)
        else {"kind": v.kind, "node": v.node, "message": v.message, "residual": v.residual}
        for v in violations
    ]
    _emit(_dumps({"valid": not report, "violations": report}), output)
    if report:
        ctx.exit(ModelError.exit_code)


def run(argv=None):
    """Run the command line and return its exit code."""
    try:
        result = cli.main(args=argv, prog_name="riskbn", standalone_mode=False)
    except RiskbnError as e:
        logger.debug("Command failed", exc_info=True)
        click.echo("Error: {error}".format(error=e), err=True)
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except OSError as e:
        click.echo("Error: {error}".format(error=e), err=True)
        return 1
    return result if isinstance(result, int) else 0


def main():
    sys.exit(run(sys.argv[1:]))
