"""Typed functional-program DSL: AST, type checker, and evaluator.

Programs are module-composition trees with optional named let-bindings,
serialized as JSON. The type checker validates every node against the
module registry before evaluation; a typechecked program can still
produce the Invalid value at runtime (empty selections, ambiguous
Unique, ...), which propagates to the root and marks the question
unanswerable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .context import ObjectRef, SimContext
from .events import COLLISION, ENTER_BASKET, MOTION_EPS
from .scene import COLORS, SHAPES, SIZES

# value type tags
OBJECT = "Object"
OBJECT_SET = "ObjectSet"
OBJECT_SET_LIST = "ObjectSetList"
EVENT = "Event"
EVENT_SET = "EventSet"
EVENT_SET_LIST = "EventSetList"
SIZE = "Size"
COLOR = "Color"
SHAPE = "Shape"
INTEGER = "Integer"
BOOL = "Bool"
BOOL_LIST = "BoolList"

ROOT_TYPES = (COLOR, SHAPE, INTEGER, BOOL)

ANSWER_TYPE_BY_ROOT = {COLOR: "color", SHAPE: "shape", INTEGER: "count", BOOL: "boolean"}

MAX_COUNT_ANSWER = 10
ANSWER_VOCABULARY = (
    list(COLORS) + list(SHAPES) + ["True", "False"]
    + [str(i) for i in range(MAX_COUNT_ANSWER + 1)]
)
ANSWER_TYPE_VOCABULARY = {
    "color": list(COLORS),
    "shape": list(SHAPES),
    "boolean": ["True", "False"],
    "count": [str(i) for i in range(MAX_COUNT_ANSWER + 1)],
}


class _Invalid:
    """Singleton propagated by any module that receives or produces it."""

    def __repr__(self):
        return "INVALID"

    def __bool__(self):
        return False


INVALID = _Invalid()


class ProgramTypeError(TypeError):
    pass


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Node:
    module: str | None = None
    args: tuple[str, ...] = ()
    children: tuple["Node", ...] = ()
    var: str | None = None

    def is_var(self) -> bool:
        return self.var is not None


@dataclass(frozen=True)
class Program:
    root: Node
    lets: tuple[tuple[str, Node], ...] = ()


def call(module: str, *children: Node, args: tuple[str, ...] = ()) -> Node:
    return Node(module=module, args=tuple(args), children=tuple(children))


def var(name: str) -> Node:
    return Node(var=name)


# registry: module -> list of (child types, literal types, return type)
SIGNATURES: dict[str, list[tuple[tuple[str, ...], tuple[str, ...], str]]] = {
    # input modules
    "SceneAtStart": [((), (), OBJECT_SET)],
    "SceneAtEnd": [((), (), OBJECT_SET)],
    "StartSceneStep": [((), (), INTEGER)],
    "EndSceneStep": [((), (), INTEGER)],
    "Events": [((), (), EVENT_SET)],
    # output modules
    "QueryColor": [((OBJECT,), (), COLOR)],
    "QueryShape": [((OBJECT,), (), SHAPE)],
    "Count": [((OBJECT_SET,), (), INTEGER)],
    "Exist": [((OBJECT_SET,), (), BOOL), ((EVENT_SET,), (), BOOL)],
    "AnyFalse": [((BOOL_LIST,), (), BOOL)],
    "AnyTrue": [((BOOL_LIST,), (), BOOL)],
    "IsBefore": [((EVENT, EVENT), (), BOOL)],
    "IsAfter": [((EVENT, EVENT), (), BOOL)],
    # object filters
    "FilterColor": [((OBJECT_SET,), (COLOR,), OBJECT_SET)],
    "FilterShape": [((OBJECT_SET,), (SHAPE,), OBJECT_SET)],
    "FilterSize": [((OBJECT_SET,), (SIZE,), OBJECT_SET)],
    "FilterDynamic": [((OBJECT_SET,), (), OBJECT_SET)],
    "FilterMoving": [((OBJECT_SET, INTEGER), (), OBJECT_SET)],
    "FilterStationary": [((OBJECT_SET, INTEGER), (), OBJECT_SET)],
    # event filters
    "FilterEvents": [((EVENT_SET, OBJECT), (), EVENT_SET)],
    "FilterCollision": [((EVENT_SET,), (), EVENT_SET)],
    "FilterCollisionWithDynamics": [((EVENT_SET,), (), EVENT_SET)],
    "FilterCollideGround": [((EVENT_SET,), (), EVENT_SET)],
    "FilterCollideGroundList": [((EVENT_SET_LIST,), (), EVENT_SET_LIST)],
    "FilterCollideBasket": [((EVENT_SET,), (), EVENT_SET)],
    "FilterCollideBasketList": [((EVENT_SET_LIST,), (), EVENT_SET_LIST)],
    "FilterEnterBasket": [((EVENT_SET,), (), EVENT_SET)],
    "FilterEnterBasketList": [((EVENT_SET_LIST,), (), EVENT_SET_LIST)],
    "FilterBefore": [((EVENT_SET, EVENT), (), EVENT_SET)],
    "FilterAfter": [((EVENT_SET, EVENT), (), EVENT_SET)],
    "FilterFirst": [((EVENT_SET,), (), EVENT)],
    "FilterLast": [((EVENT_SET,), (), EVENT)],
    "EventPartner": [((EVENT, OBJECT), (), OBJECT)],
    "FilterObjectsFromEvents": [((EVENT_SET,), (), OBJECT_SET)],
    "FilterObjectsFromEventsList": [((EVENT_SET_LIST,), (), OBJECT_SET_LIST)],
    "GetCounterfactEvents": [((OBJECT,), (), EVENT_SET)],
    "GetCounterfactEventsList": [((OBJECT_SET,), (), EVENT_SET_LIST)],
    # auxiliary modules
    "Unique": [((OBJECT_SET,), (), OBJECT)],
    "Intersect": [((OBJECT_SET, OBJECT_SET), (), OBJECT_SET)],
    "IntersectList": [((OBJECT_SET_LIST, OBJECT_SET), (), OBJECT_SET_LIST)],
    "Difference": [((OBJECT_SET, OBJECT_SET), (), OBJECT_SET)],
    "ExistList": [((OBJECT_SET_LIST,), (), BOOL_LIST), ((EVENT_SET_LIST,), (), BOOL_LIST)],
    "AsList": [((OBJECT,), (), OBJECT_SET)],
}

_LITERAL_DOMAIN = {COLOR: COLORS, SHAPE: SHAPES, SIZE: SIZES}


def canonical_literal(value: str, literal_type: str) -> str:
    lowered = value.lower()
    if lowered not in _LITERAL_DOMAIN[literal_type]:
        raise ProgramTypeError(
            f"{value!r} is not a valid {literal_type}; expected one of "
            f"{', '.join(_LITERAL_DOMAIN[literal_type])}")
    return lowered


def typecheck(program: Program) -> str:
    """Validate every node; returns the root type or raises ProgramTypeError."""
    env: dict[str, str] = {}
    for name, node in program.lets:
        env[name] = _check_node(node, env, path=f"let {name}")
    root_type = _check_node(program.root, env, path="root")
    if root_type not in ROOT_TYPES:
        raise ProgramTypeError(
            f"root type {root_type} is not an answer type (expected one of {ROOT_TYPES})")
    return root_type


def _check_node(node: Node, env: dict[str, str], path: str) -> str:
    if node.is_var():
        if node.var not in env:
            raise ProgramTypeError(f"{path}: unbound variable {node.var!r}")
        return env[node.var]
    if node.module not in SIGNATURES:
        raise ProgramTypeError(f"{path}: unknown module {node.module!r}")
    here = f"{path}/{node.module}"
    child_types = tuple(_check_node(c, env, here) for c in node.children)
    overloads = SIGNATURES[node.module]
    for expected_children, expected_literals, return_type in overloads:
        if child_types == expected_children and len(node.args) == len(expected_literals):
            for raw, lit_type in zip(node.args, expected_literals):
                canonical_literal(raw, lit_type)
            return return_type
    wanted = " | ".join(
        f"({', '.join(c for c in ec + el)}) -> {rt}" for ec, el, rt in overloads)
    got = ", ".join(child_types + node.args)
    raise ProgramTypeError(f"{here}: arguments ({got}) do not match signature {wanted}")


# ---------------------------------------------------------------------------
# evaluation

def _unique_objects(ids, ctx: SimContext) -> tuple[ObjectRef, ...]:
    seen = set()
    out = []
    for obj_id in ids:
        if obj_id not in seen:
            seen.add(obj_id)
            ref = ctx.by_id.get(obj_id)
            if ref is not None:
                out.append(ref)
    return tuple(out)


def _step_speed_filter(ctx, objects, step, moving: bool):
    if step not in (0, -1):
        raise EvaluationError(f"step index {step} is not 0 or -1")
    out = []
    for obj in objects:
        speed = ctx.speed_at(obj.id, step)
        if (speed > MOTION_EPS) == moving:
            out.append(obj)
    return tuple(out)


def _eval_module(module: str, args: tuple, literals: tuple[str, ...], ctx: SimContext):
    if module == "SceneAtStart" or module == "SceneAtEnd":
        return ctx.objects
    if module == "StartSceneStep":
        return 0
    if module == "EndSceneStep":
        return -1
    if module == "Events":
        return ctx.events
    if module == "QueryColor":
        return args[0].color if args[0].color is not None else INVALID
    if module == "QueryShape":
        return args[0].shape if args[0].shape is not None else INVALID
    if module == "Count":
        return len(args[0])
    if module == "Exist":
        return len(args[0]) > 0
    if module == "AnyFalse":
        return any(not b for b in args[0])
    if module == "AnyTrue":
        return any(args[0])
    if module == "IsBefore":
        return args[0].tick < args[1].tick
    if module == "IsAfter":
        return args[0].tick > args[1].tick
    if module == "FilterColor":
        want = literals[0]
        return tuple(o for o in args[0] if o.color == want)
    if module == "FilterShape":
        want = literals[0]
        return tuple(o for o in args[0] if o.shape == want)
    if module == "FilterSize":
        want = literals[0]
        return tuple(o for o in args[0] if o.size == want)
    if module == "FilterDynamic":
        return tuple(o for o in args[0] if o.is_dynamic)
    if module == "FilterMoving":
        return _step_speed_filter(ctx, args[0], args[1], moving=True)
    if module == "FilterStationary":
        return _step_speed_filter(ctx, args[0], args[1], moving=False)
    if module == "FilterEvents":
        obj_id = args[1].id
        return tuple(e for e in args[0] if obj_id in e.participants)
    if module == "FilterCollision":
        return tuple(e for e in args[0] if e.type == COLLISION)
    if module == "FilterCollisionWithDynamics":
        dyn = ctx.dynamic_ids
        return tuple(e for e in args[0]
                     if e.type == COLLISION and all(p in dyn for p in e.participants))
    if module == "FilterCollideGround":
        ground = ctx.ground_ids
        return tuple(e for e in args[0]
                     if e.type == COLLISION and any(p in ground for p in e.participants))
    if module == "FilterCollideBasket":
        basket = ctx.basket_ids
        return tuple(e for e in args[0]
                     if e.type == COLLISION and any(p in basket for p in e.participants))
    if module == "FilterEnterBasket":
        return tuple(e for e in args[0] if e.type == ENTER_BASKET)
    if module in ("FilterCollideGroundList", "FilterCollideBasketList", "FilterEnterBasketList"):
        scalar = module[:-4]
        return tuple(_eval_module(scalar, (es,), (), ctx) for es in args[0])
    if module == "FilterBefore":
        ref = args[1]
        return tuple(e for e in args[0] if e.tick < ref.tick)
    if module == "FilterAfter":
        ref = args[1]
        return tuple(e for e in args[0] if e.tick > ref.tick)
    if module == "FilterFirst":
        return args[0][0] if args[0] else INVALID
    if module == "FilterLast":
        return args[0][-1] if args[0] else INVALID
    if module == "EventPartner":
        event, obj = args
        if len(event.participants) != 2 or obj.id not in event.participants:
            return INVALID
        other = event.participants[0] if event.participants[1] == obj.id else event.participants[1]
        return ctx.by_id.get(other, INVALID)
    if module == "FilterObjectsFromEvents":
        ids = [p for e in args[0] for p in e.participants]
        return _unique_objects(ids, ctx)
    if module == "FilterObjectsFromEventsList":
        return tuple(_unique_objects([p for e in es for p in e.participants], ctx)
                     for es in args[0])
    if module == "GetCounterfactEvents":
        obj = args[0]
        if not obj.is_dynamic:
            return INVALID
        return ctx.counterfactual_events(obj.id)
    if module == "GetCounterfactEventsList":
        out = []
        for obj in args[0]:
            if not obj.is_dynamic:
                return INVALID
            out.append(ctx.counterfactual_events(obj.id))
        return tuple(out)
    if module == "Unique":
        return args[0][0] if len(args[0]) == 1 else INVALID
    if module == "Intersect":
        keep = {o.id for o in args[1]}
        return tuple(o for o in args[0] if o.id in keep)
    if module == "IntersectList":
        keep = {o.id for o in args[1]}
        return tuple(tuple(o for o in s if o.id in keep) for s in args[0])
    if module == "Difference":
        drop = {o.id for o in args[1]}
        return tuple(o for o in args[0] if o.id not in drop)
    if module == "ExistList":
        return tuple(len(x) > 0 for x in args[0])
    if module == "AsList":
        return (args[0],)
    raise EvaluationError(f"no evaluator for module {module!r}")


def evaluate(program: Program, ctx: SimContext):
    """Bottom-up evaluation with let-binding support; returns the raw root value."""
    env: dict[str, object] = {}
    for name, node in program.lets:
        env[name] = _eval_node(node, env, ctx, path=f"let {name}")
    return _eval_node(program.root, env, ctx, path="root")


def _eval_node(node: Node, env: dict, ctx: SimContext, path: str):
    if node.is_var():
        return env[node.var]
    here = f"{path}/{node.module}"
    child_values = tuple(_eval_node(c, env, ctx, here) for c in node.children)
    if any(v is INVALID for v in child_values):
        return INVALID
    literals = tuple(
        canonical_literal(raw, lit_type)
        for raw, lit_type in zip(node.args, _literal_types(node, child_values)))
    try:
        return _eval_module(node.module, child_values, literals, ctx)
    except EvaluationError as exc:
        raise EvaluationError(f"{here}: {exc}") from None


def _literal_types(node: Node, child_values) -> tuple[str, ...]:
    for expected_children, expected_literals, _rt in SIGNATURES[node.module]:
        if len(expected_children) == len(node.children) and len(expected_literals) == len(node.args):
            return expected_literals
    return ()


def render_answer(value, root_type: str):
    """Map a root value to the answer vocabulary; INVALID passes through."""
    if value is INVALID:
        return INVALID
    if root_type == BOOL:
        return "True" if value else "False"
    if root_type == INTEGER:
        return str(value)
    return str(value)


def evaluate_answer(program: Program, ctx: SimContext):
    """Typecheck-assumed evaluation straight to an answer string (or INVALID)."""
    root_type = typecheck(program)
    value = evaluate(program, ctx)
    return render_answer(value, root_type), ANSWER_TYPE_BY_ROOT[root_type]


# ---------------------------------------------------------------------------
# serialization

def node_to_dict(node: Node) -> dict:
    if node.is_var():
        return {"var": node.var}
    out: dict = {"module": node.module}
    if node.args:
        out["args"] = list(node.args)
    if node.children:
        out["children"] = [node_to_dict(c) for c in node.children]
    return out


def node_from_dict(data: dict) -> Node:
    if "var" in data:
        return Node(var=data["var"])
    return Node(
        module=data["module"],
        args=tuple(data.get("args", ())),
        children=tuple(node_from_dict(c) for c in data.get("children", ())),
    )


def program_to_dict(program: Program) -> dict:
    out: dict = {"root": node_to_dict(program.root)}
    if program.lets:
        out["lets"] = [{"name": name, "program": node_to_dict(node)}
                       for name, node in program.lets]
    return out


def program_from_dict(data: dict) -> Program:
    lets = tuple((entry["name"], node_from_dict(entry["program"]))
                 for entry in data.get("lets", ()))
    return Program(root=node_from_dict(data["root"]), lets=lets)


def load_program(path) -> Program:
    with open(path) as fh:
        return program_from_dict(json.load(fh))


def pretty(program: Program) -> str:
    """Debug rendering in the indented call style of the source programs."""
    lines = []
    for name, node in program.lets:
        lines.append(f"Var {name} = {_pretty_inline(node)}")
    lines.append(_pretty_block(program.root, 0))
    return "\n".join(lines)


def _pretty_inline(node: Node) -> str:
    if node.is_var():
        return node.var
    parts = [_pretty_inline(c) for c in node.children] + [f'"{a}"' for a in node.args]
    return f"{node.module} ( {', '.join(parts)} )" if parts else f"{node.module}()"


def _pretty_block(node: Node, depth: int) -> str:
    pad = "    " * depth
    if node.is_var():
        return f"{pad}{node.var}"
    if not node.children and not node.args:
        return f"{pad}{node.module}()"
    inner = [_pretty_block(c, depth + 1) for c in node.children]
    inner += [f'{"    " * (depth + 1)}"{a}"' for a in node.args]
    body = ",\n".join(inner)
    return f"{pad}{node.module} (\n{body}\n{pad})"
