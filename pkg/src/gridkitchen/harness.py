"""Experiment runner: prompt rendering, endpoint calls, plan parsing, rows.

Each (bundle, method) pair becomes one chat completion request, one
parsed plan, one simulated run, and one appended JSON line.  Rows are
self-contained so scores can be recomputed from the file alone.
"""

from __future__ import annotations

import concurrent.futures
import glob as globlib
import json
import os
import re
import time
from dataclasses import dataclass

import requests
import tomli

from .engine import Plan, PlanError
from .metrics import score_result_rows
from .taskgen import TaskBundle, run_bundle_plan


class HarnessError(Exception):
    pass


# Prompt texts are benchmark data.  The {{ }} pairs in the format
# examples are brace escapes carried by the source material; rendering
# collapses them to single braces before the task payload (whose JSON
# legitimately contains adjacent braces) is inserted.

IO_TEMPLATE = """\
You are given the input map JSON, recipes, and orders, along with the Overcooked multi-agent parallel planning rules described below. Your goal is to generate a detailed action plan (Action List) for guiding each agent to complete dish preparation. The action plan must strictly follow the specified format and constraints.

Core Principles:
    Maximize Efficiency: Minimize the total time required to complete all orders. This is the most critical goal.
    Maximize Parallelism: Ensure multiple agents are working simultaneously whenever possible to reduce idle time.
    Ensure Accuracy: Adhere 100% to all action definitions, rules, and constraints outlined below.

Input Content:
    Map JSON: Describes kitchen layout, station coordinates, initial items, and agent positions.
    Recipes: Describes the preparation workflow and required ingredients for the dishes.
    Orders: Describe the dishes that need to be completed in order.

Output Requirements:
    For each agent, output an ordered action list (e.g., agent1, agent2).
    Each action is a dictionary containing action type and parameters.
    Please strictly follow the output standard JSON format action list. Do not add any additional explanations or content!

Output Format Example:
    {{
        "plan": {{
            "agent1": [
                {{"action": "MoveTo", "target": [x1, y1]}},
                {{"action": "Interact", "target": "station_name1"}},
                ...
            ],
            "agent2": [
                {{"action": "MoveTo", "target": [x2, y2]}},
                {{"action": "Process", "target": "station_name2"}},
                ...
            ],
            ...
           }}
    }}

Task:

{task}

Environment Rules and Constraints:

Agent Rules:
    No Collision: Agents do not consider collision boxes between each other; their movement paths and positions can overlap at any time.
    Single Item Hold: An agent can only hold one item at a time (e.g., an ingredient, a plate, a pot). Item exchange must be done via surfaces like tables; direct passing is not allowed. Cannot hold multiple ingredients or containers at once.
    Positioning: Agents can only stand on empty floor tiles; actions must be performed on adjacent empty ground to target stations; movement can only occur through empty ground. At any time, an agent's coordinates can never overlap with a station's coordinates.
    Agents can only interact or process with workstations that are adjacent in the four cardinal directions (up, down, left, right).

Environment & Item Rules:
    Station Exclusivity: Fixed stations like cutting boards or sinks can only be used by one agent at a time for a Process action.
    Ingredient Dispensing: Ingredients can only be obtained from designated dispensers. Each dispenser provides a specific type of ingredient. All types of ingredients can be directly held without the need for additional containers.
    Cooking Process:
        Stoves can only hold cookware (pots/pans), not ingredients directly.
        Cooking starts automatically once cookware is placed on a stove and contains ingredients. Picking it up pauses cooking; placing it back on any stove resumes it.
        Cooked food cannot be picked up by hand; it must be transferred in a container.
    Serving Process:
        All food items must be placed on a plate before being submitted at the serving window. The order in which the ingredients are placed on the plate is not important.
        Dishes must be served in the exact order specified in the Orders list.
    Plate Cycle:
        Dirty plates return to the dirty plate return station some time after a dish is served.
        A dirty plate cannot hold any items and must be washed at a sink to become a clean plate.
    Time Consumption:
        Move: {MOVE_TIME} unit per tile
        Interact: {INTERACT_TIME} units
        Chopping: {PROCESS_CUT_TIME} units
        Pot Cooking: {PROCESS_POT_COOK_TIME} units
        Pan Cooking: {PROCESS_PAN_COOK_TIME} units
        Washing Plates: {PROCESS_WASH_PLATE_TIME} units
        Dirty Plate Return: {RETURN_DIRTY_PLATE_TIME} units

Action Definitions:
    MoveTo(coordinate):
        format: {{"action": "MoveTo", "target": [x, y]}}
    Interact(target_name):
        format: {{"action": "Interact", "target": "station_name"}}
    Process(target_name):
        format: {{"action": "Process", "target": "station_name"}}
    Wait(duration):
        format: {{"action": "Wait", "duration": t}}
    Finish():
        format: {{"action": "Finish"}}

Suggestions:
    Tasks must be reasonably allocated to achieve multi-agent parallel collaboration and minimize total time consumption.
    Action sequence must completely cover the entire process from raw material acquisition, processing, assembly to serving.
    Always notice the timepoint when each action starts and ends to ensure no conflicts in agent actions and get the most efficient plan."""

COT_TEMPLATE = """\
You are given the input map JSON, recipes, and orders, along with the Overcooked multi-agent parallel planning rules described below. Your goal is to generate a **step-by-step reasoning process** (Chain-of-Thought, CoT) that leads to a detailed action plan for guiding each agent to complete dish preparation. The reasoning must explicitly explain the allocation of subtasks, parallel coordination, and timing decisions. 

Core Principles:
    Maximize Efficiency: Minimize the total time required to complete all orders. This is the most critical goal.
    Maximize Parallelism: Ensure multiple agents are working simultaneously whenever possible to reduce idle time.
    Ensure Accuracy: Adhere 100% to all action definitions, rules, and constraints outlined below.

Input Content:
    Map JSON: Describes kitchen layout, station coordinates, initial items, and agent positions.
    Recipes: Describes the preparation workflow and required ingredients for the dishes.
    Orders: Describe the dishes that need to be completed in order.

Output Requirements:
    For each agent, output an ordered action list alongside the CoT reasoning steps.
    Each step should include: reasoning about which subtask to execute, dependencies, and timing considerations.
    Each action is a dictionary containing action type and parameters.
    Please strictly follow the output standard JSON format for action lists and reasoning steps. Do not add any additional explanations outside of the CoT reasoning.

Output Format Example:
    {{
        "CoT": [
            "Step 1: Agent1 moves to ingredient dispenser to pick up tomato, reasoning: starting first ingredient to minimize idle time",
            "Step 2: Agent2 moves to counter to prepare plate, reasoning: parallel work to maximize efficiency",
            ...
        ],
        "plan": {{
            "agent1": [
                {{"action": "MoveTo", "target": [x1, y1]}},
                {{"action": "Interact", "target": "station_name1"}},
                ...
            ],
            "agent2": [
                {{"action": "MoveTo", "target": [x2, y2]}},
                {{"action": "Process", "target": "station_name2"}},
                ...
            ],
            ...
           }}
    }}

Task:

{task}

Environment Rules and Constraints:

Agent Rules:
    No Collision: Agents do not consider collision boxes between each other; movement paths and positions can overlap.
    Single Item Hold: Agents can only hold one item at a time. Exchanges must be done via surfaces; direct passing is not allowed.
    Positioning: Agents can only stand on empty floor tiles; movement can only occur through empty ground; coordinates cannot overlap with stations.
    Interactions: Only with adjacent workstations in four cardinal directions.

Environment & Item Rules:
    Station Exclusivity: Fixed stations can only be used by one agent at a time.
    Ingredient Dispensing: Ingredients obtained only from designated dispensers.
    Cooking Process: Stoves hold cookware, start automatically when ingredients are inside; cooked food must be transferred in a container.
    Serving Process: Food must be plated before submission; served in order of Orders list.
    Plate Cycle: Dirty plates return to the dirty plate return station; washed at a sink to become clean.
    Time Costs:
        Move: {MOVE_TIME} unit per tile
        Interact: {INTERACT_TIME} units
        Chopping: {PROCESS_CUT_TIME} units
        Pot Cooking: {PROCESS_POT_COOK_TIME} units
        Pan Cooking: {PROCESS_PAN_COOK_TIME} units
        Washing Plates: {PROCESS_WASH_PLATE_TIME} units
        Dirty Plate Return: {RETURN_DIRTY_PLATE_TIME} units

Action Definitions:
    MoveTo(coordinate):
        format: {{"action": "MoveTo", "target": [x, y]}}
    Interact(target_name):
        format: {{"action": "Interact", "target": "station_name"}}
    Process(target_name):
        format: {{"action": "Process", "target": "station_name"}}
    Wait(duration):
        format: {{"action": "Wait", "duration": t}}
    Finish():
        format: {{"action": "Finish"}}

Suggestions:
    Tasks must be reasonably allocated to achieve multi-agent parallel collaboration and minimize total time consumption.
    Action sequence must completely cover the entire process from raw material acquisition, processing, assembly to serving.
    Always notice the timepoint when each action starts and ends to ensure no conflicts in agent actions and get the most efficient plan."""

TEMPLATES = {"io": IO_TEMPLATE, "cot": COT_TEMPLATE}

PLACEHOLDERS = {
    "{MOVE_TIME}": "move_per_tile",
    "{INTERACT_TIME}": "interact",
    "{PROCESS_CUT_TIME}": "cut",
    "{PROCESS_POT_COOK_TIME}": "pot_cook",
    "{PROCESS_PAN_COOK_TIME}": "pan_cook",
    "{PROCESS_WASH_PLATE_TIME}": "wash_plate",
    "{RETURN_DIRTY_PLATE_TIME}": "dirty_plate_return",
}


def task_block(bundle: TaskBundle) -> str:
    lines = [
        "Map JSON:",
        json.dumps(bundle.grid.to_json(), sort_keys=True, separators=(",", ":")),
        "",
        "Recipes:",
    ]
    for recipe in bundle.recipes:
        lines.append(f"{recipe.id}: {recipe.text}")
    lines.append("")
    lines.append("Orders:")
    for pos, dish in enumerate(bundle.orders, start=1):
        lines.append(f"{pos}. {dish}")
    return "\n".join(lines)


def render_prompt(bundle: TaskBundle, method: str) -> str:
    if method not in TEMPLATES:
        raise HarnessError(f"unknown method {method!r}, expected one of {sorted(TEMPLATES)}")
    text = TEMPLATES[method]
    text = text.replace("{{", "{").replace("}}", "}")
    for placeholder, attr in PLACEHOLDERS.items():
        value = getattr(bundle.constants, attr, None)
        if value is None:
            raise HarnessError(f"bundle constants missing {attr!r}")
        text = text.replace(placeholder, str(value))
    for placeholder in PLACEHOLDERS:
        if placeholder in text:
            raise HarnessError(f"unfilled placeholder {placeholder}")
    return text.replace("{task}", task_block(bundle))


# -- model output parsing --------------------------------------------------------

@dataclass
class ParsedOutput:
    plan: Plan | None
    cot: list | None
    error: str | None


_FENCE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.S)


def _json_candidates(raw: str):
    stripped = raw.strip()
    if stripped:
        yield stripped
    for match in _FENCE.finditer(raw):
        yield match.group(1).strip()
    first, last = raw.find("{"), raw.rfind("}")
    if first != -1 and last > first:
        yield raw[first:last + 1]


def parse_plan(raw: str) -> ParsedOutput:
    """Extract the outermost JSON object and validate the action schema.

    Markdown fences and surrounding prose are tolerated.  A "CoT" key is
    kept for the row but never becomes part of the plan.
    """
    if not isinstance(raw, str) or not raw.strip():
        return ParsedOutput(None, None, "empty output")
    obj = None
    for position, candidate in enumerate(_json_candidates(raw)):
        try:
            parsed = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(parsed, dict):
            obj = parsed
            break
        if position == 0:
            # the whole reply is valid JSON of the wrong shape; do not
            # go mining its substrings for something object-like
            return ParsedOutput(None, None, "top-level JSON is not an object")
    if obj is None:
        return ParsedOutput(None, None, "no JSON object found")
    cot = obj.get("CoT")
    if not isinstance(cot, list):
        cot = None
    try:
        plan = Plan.from_json(obj)
    except PlanError as exc:
        return ParsedOutput(None, cot, str(exc))
    return ParsedOutput(plan, cot, None)


# -- experiment configuration ------------------------------------------------------

@dataclass
class ExperimentConfig:
    url: str
    model: str
    methods: list[str]
    bundles: list[str]  # resolved bundle file paths
    out: str
    api_key_env: str | None = None
    retries: int = 2
    parallelism: int = 4
    temperature: float = 0.0
    max_tokens: int | None = None
    timeout: float = 120.0

    @classmethod
    def from_toml(cls, path: str) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            data = tomli.load(fh)
        endpoint = data.get("endpoint")
        run = data.get("run")
        if not isinstance(endpoint, dict) or not isinstance(run, dict):
            raise HarnessError("config needs [endpoint] and [run] tables")
        url = endpoint.get("url")
        model = endpoint.get("model")
        if not url or not model:
            raise HarnessError("config needs endpoint.url and endpoint.model")
        methods = run.get("methods", ["io"])
        if isinstance(methods, str):
            methods = [methods]
        for method in methods:
            if method not in TEMPLATES:
                raise HarnessError(f"unknown method {method!r} in config")
        patterns = run.get("bundles")
        if isinstance(patterns, str):
            patterns = [patterns]
        if not patterns:
            raise HarnessError("config needs run.bundles")
        base = os.path.dirname(os.path.abspath(path))
        paths: list[str] = []
        for pattern in patterns:
            if not os.path.isabs(pattern):
                pattern = os.path.join(base, pattern)
            paths.extend(sorted(globlib.glob(pattern)))
        if not paths:
            raise HarnessError("no bundle files matched run.bundles")
        out = run.get("out", "results.jsonl")
        if not os.path.isabs(out):
            out = os.path.join(base, out)
        return cls(
            url=url,
            model=model,
            methods=list(methods),
            bundles=paths,
            out=out,
            api_key_env=endpoint.get("api_key_env"),
            retries=int(run.get("retries", 2)),
            parallelism=int(run.get("parallelism", 4)),
            temperature=float(run.get("temperature", 0.0)),
            max_tokens=run.get("max_tokens"),
            timeout=float(run.get("timeout", 120.0)),
        )


def _http_transport(config: ExperimentConfig):
    def call(payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if config.api_key_env:
            # read at request time, never persisted anywhere
            key = os.environ.get(config.api_key_env)
            if not key:
                raise HarnessError(f"environment variable {config.api_key_env} is not set")
            headers["Authorization"] = f"Bearer {key}"
        resp = requests.post(config.url, json=payload, headers=headers,
                             timeout=config.timeout)
        resp.raise_for_status()
        return resp.json()

    return call


def _existing_keys(path: str) -> set[tuple]:
    keys = set()
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError:
                    continue  # torn tail line from an interrupted run
                keys.add((row.get("bundle_id"), row.get("model"), row.get("method")))
    return keys


def _run_one(config: ExperimentConfig, bundle: TaskBundle, method: str,
             transport) -> dict:
    row = {
        "bundle_id": bundle.bundle_id,
        "model": config.model,
        "method": method,
        "controller": "model",
        "category": bundle.category,
        "difficulty": bundle.difficulty.get("recipe"),
        "map": bundle.difficulty.get("map"),
        "n_agents": bundle.n_agents,
        "n_dishes": bundle.n_dishes,
        "seed": bundle.seed,
        "t_max": bundle.t_max,
        "d_max": bundle.d_max,
        "infra_failure": False,
        "raw_output": None,
        "parse_error": None,
        "cot": None,
        "record": None,
        "usage": None,
        "error": None,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "wall_seconds": None,
    }
    payload = {
        "model": config.model,
        "messages": [{"role": "user", "content": render_prompt(bundle, method)}],
        "temperature": config.temperature,
    }
    if config.max_tokens is not None:
        payload["max_tokens"] = config.max_tokens
    began = time.monotonic()
    content = None
    last_error = None
    for attempt in range(config.retries + 1):
        try:
            reply = transport(payload)
            text = reply["choices"][0]["message"]["content"]
            if not isinstance(text, str):
                raise HarnessError("message content is not a string")
            content = text
            row["usage"] = reply.get("usage")
            break
        except Exception as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            if attempt < config.retries:
                time.sleep(min(2.0, 0.2 * (attempt + 1)))
    row["wall_seconds"] = round(time.monotonic() - began, 3)
    if content is None:
        row["infra_failure"] = True
        row["error"] = last_error
        return row
    row["raw_output"] = content
    parsed = parse_plan(content)
    row["cot"] = parsed.cot
    if parsed.plan is None:
        row["parse_error"] = parsed.error
        return row
    record = run_bundle_plan(bundle, parsed.plan)
    row["record"] = record.to_json()
    return row


def run_experiment(config: ExperimentConfig, transport=None) -> str:
    """Render, call, parse, execute, and append one row per (bundle, method).

    Already-present (bundle, model, method) rows are skipped, so an
    interrupted run resumes without duplicates.  Transport failures are
    retried, then recorded as infrastructure-failure rows.
    """
    bundles = []
    for path in config.bundles:
        with open(path) as fh:
            bundles.append(TaskBundle.loads(fh.read()))
    if transport is None:
        if config.api_key_env and not os.environ.get(config.api_key_env):
            raise HarnessError(
                f"environment variable {config.api_key_env} is not set")
        transport = _http_transport(config)
    done = _existing_keys(config.out)
    work = [(bundle, method)
            for method in config.methods
            for bundle in bundles
            if (bundle.bundle_id, config.model, method) not in done]
    out_dir = os.path.dirname(config.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    # a torn final line from an interrupted run must not swallow new rows
    fresh_line_needed = os.path.exists(config.out) and os.path.getsize(config.out) > 0
    if fresh_line_needed:
        with open(config.out, "rb") as fh:
            fh.seek(-1, os.SEEK_END)
            fresh_line_needed = fh.read(1) != b"\n"
    with open(config.out, "a") as sink:
        if fresh_line_needed:
            sink.write("\n")
        if work:
            with concurrent.futures.ThreadPoolExecutor(
                    max_workers=config.parallelism) as pool:
                futures = [pool.submit(_run_one, config, bundle, method, transport)
                           for bundle, method in work]
                # the main thread is the single writer
                for future in concurrent.futures.as_completed(futures):
                    sink.write(json.dumps(future.result(), sort_keys=True) + "\n")
                    sink.flush()
    return config.out


# -- re-scoring --------------------------------------------------------------------

def load_result_rows(path: str) -> list[dict]:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError:
                continue  # torn tail line from an interrupted run
    return rows


def score_results_file(path: str) -> dict:
    return score_result_rows(load_result_rows(path))
