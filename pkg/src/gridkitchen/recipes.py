"""Dish catalog: 20 recipes across 6 categories with machine-readable workflows.

Each recipe pairs the natural-language instruction text shown to planners
with an ingredient spec the engine uses for serve matching. workflow() derives
the per-dish precedence DAG (get -> chop -> cook chains joining at plate ->
serve); required_plate() is the exact multiset a plate must carry at the
serving window.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IngredientSpec:
    """Final preparation an ingredient must reach before plating."""

    name: str
    chopped: bool = False
    cooked_in: str | None = None  # "pot" | "pan" | None

    def prep(self) -> tuple[str, bool, str | None]:
        return (self.name, self.chopped, self.cooked_in)


@dataclass(frozen=True)
class Recipe:
    id: str
    category: str
    text: str
    ingredients: tuple[IngredientSpec, ...]

    def required_plate(self) -> tuple[tuple[str, bool, str | None], ...]:
        """Sorted multiset of prep triples a serving plate must match exactly."""
        return tuple(sorted(i.prep() for i in self.ingredients))

    def workflow(self) -> tuple[list[tuple[str, str, str]], list[tuple[str, str]]]:
        """Precedence DAG as (nodes, edges).

        Nodes are (node_id, op, ingredient) with op in get/chop/cook_pot/
        cook_pan/plate/serve; edges are (from_id, to_id). Every ingredient
        chain ends at the shared plate node, which precedes serve.
        """
        nodes: list[tuple[str, str, str]] = []
        edges: list[tuple[str, str]] = []
        for spec in self.ingredients:
            prev = f"get:{spec.name}"
            nodes.append((prev, "get", spec.name))
            if spec.chopped:
                nid = f"chop:{spec.name}"
                nodes.append((nid, "chop", spec.name))
                edges.append((prev, nid))
                prev = nid
            if spec.cooked_in is not None:
                nid = f"cook:{spec.name}"
                nodes.append((nid, f"cook_{spec.cooked_in}", spec.name))
                edges.append((prev, nid))
                prev = nid
            edges.append((prev, "plate"))
        nodes.append(("plate", "plate", ""))
        nodes.append(("serve", "serve", ""))
        edges.append(("plate", "serve"))
        return nodes, edges

    @property
    def needs_cutting(self) -> bool:
        return any(i.chopped for i in self.ingredients)

    @property
    def vessels(self) -> set[str]:
        return {i.cooked_in for i in self.ingredients if i.cooked_in}

    @property
    def ingredient_names(self) -> list[str]:
        return [i.name for i in self.ingredients]

    def to_json(self) -> dict:
        return {"id": self.id, "category": self.category, "text": self.text}


def _ing(name: str, chopped: bool = False, cooked_in: str | None = None) -> IngredientSpec:
    return IngredientSpec(name=name, chopped=chopped, cooked_in=cooked_in)


RECIPES: tuple[Recipe, ...] = (
    # -- burger -------------------------------------------------------------
    Recipe(
        id="burger_basic",
        category="burger",
        text="First chop the meat and cook it in pan. Then put the cooked meat "
             "with a piece of bread on a plate to make a basic burger.",
        ingredients=(_ing("meat", True, "pan"), _ing("bread")),
    ),
    Recipe(
        id="burger_lettuce",
        category="burger",
        text="Chop the meat and cook it in pan. Chop the lettuce. Then put the "
             "cooked meat, chopped lettuce with a piece of bread on a plate to "
             "make a burger with lettuce.",
        ingredients=(_ing("meat", True, "pan"), _ing("lettuce", True), _ing("bread")),
    ),
    Recipe(
        id="burger_full",
        category="burger",
        text="Chop the meat and cook it in pan. Chop the lettuce and tomato. "
             "Then put the cooked meat, chopped lettuce, chopped tomato with a "
             "piece of bread on a plate to make a full burger.",
        ingredients=(
            _ing("meat", True, "pan"),
            _ing("lettuce", True),
            _ing("tomato", True),
            _ing("bread"),
        ),
    ),
    Recipe(
        id="burger_cheese",
        category="burger",
        text="Chop the meat and cook it in pan. Then put the cooked meat with a "
             "piece of bread and a slice of cheese on a plate to make a burger "
             "with cheese.",
        ingredients=(_ing("meat", True, "pan"), _ing("bread"), _ing("cheese")),
    ),
    Recipe(
        id="burger_cheese_lettuce",
        category="burger",
        text="Chop the meat and cook it in pan. Chop the lettuce. Then put the "
             "cooked meat, chopped lettuce with a piece of bread and a slice of "
             "cheese on a plate to make a burger with cheese and lettuce.",
        ingredients=(
            _ing("meat", True, "pan"),
            _ing("lettuce", True),
            _ing("bread"),
            _ing("cheese"),
        ),
    ),
    # -- burrito ------------------------------------------------------------
    Recipe(
        id="burrito_meat",
        category="burrito",
        text="Chop and cook the meat in pan, cook the rice in pot, then put "
             "cooked meat and cooked rice together with a raw tortilla to a "
             "plate to make a burrito with meat.",
        ingredients=(_ing("meat", True, "pan"), _ing("rice", False, "pot"), _ing("tortilla")),
    ),
    Recipe(
        id="burrito_chicken",
        category="burrito",
        text="Chop and cook the chicken in pan, cook the rice in pot, then put "
             "cooked chicken and cooked rice together with a raw tortilla to a "
             "plate to make a burrito with chicken.",
        ingredients=(_ing("chicken", True, "pan"), _ing("rice", False, "pot"), _ing("tortilla")),
    ),
    Recipe(
        id="burrito_mushroom",
        category="burrito",
        text="Chop and cook the mushroom in pan, cook the rice in pot, then put "
             "cooked mushroom and cooked rice together with a raw tortilla to a "
             "plate to make a burrito with mushroom.",
        ingredients=(_ing("mushroom", True, "pan"), _ing("rice", False, "pot"), _ing("tortilla")),
    ),
    # -- pasta --------------------------------------------------------------
    Recipe(
        id="pasta_tomato",
        category="pasta",
        text="Cook the pasta in pot, chop the tomato and cook it in pan, then "
             "put cooked pasta and cooked tomato together to a plate to make "
             "pasta with tomato pasta.",
        ingredients=(_ing("pasta", False, "pot"), _ing("tomato", True, "pan")),
    ),
    Recipe(
        id="pasta_meat",
        category="pasta",
        text="Cook the pasta in pot, chop the meat and cook it in pan, then put "
             "cooked pasta and cooked meat together to a plate to make pasta "
             "with meat sauce.",
        ingredients=(_ing("pasta", False, "pot"), _ing("meat", True, "pan")),
    ),
    Recipe(
        id="pasta_mushroom",
        category="pasta",
        text="Cook the pasta in pot, chop the mushroom and cook it in pan, then "
             "put cooked pasta and cooked mushroom together to a plate to make "
             "pasta with mushroom sauce.",
        ingredients=(_ing("pasta", False, "pot"), _ing("mushroom", True, "pan")),
    ),
    Recipe(
        id="pasta_seafood",
        category="pasta",
        text="Cook the pasta in pot, chop the fish and prawn and cook them in "
             "pan respectively, then put cooked pasta, cooked fish and cooked "
             "prawn together to a plate to make seafood pasta.",
        ingredients=(
            _ing("pasta", False, "pot"),
            _ing("fish", True, "pan"),
            _ing("prawn", True, "pan"),
        ),
    ),
    # -- salad --------------------------------------------------------------
    Recipe(
        id="salad_basic",
        category="salad",
        text="Put chopped lettuce on a plate to make a salad.",
        ingredients=(_ing("lettuce", True),),
    ),
    Recipe(
        id="salad_advanced",
        category="salad",
        text="Put chopped lettuce and chopped tomato together to a plate to "
             "make a salad.",
        ingredients=(_ing("lettuce", True), _ing("tomato", True)),
    ),
    Recipe(
        id="salad_full",
        category="salad",
        text="Put chopped lettuce, chopped tomato and chopped cucumber together "
             "to a plate to make a salad.",
        ingredients=(_ing("lettuce", True), _ing("tomato", True), _ing("cucumber", True)),
    ),
    # -- sashimi ------------------------------------------------------------
    Recipe(
        id="sashimi_fish",
        category="sashimi",
        text="Chop the fish and put the chopped fish to a plate to make sashimi "
             "with fish.",
        ingredients=(_ing("fish", True),),
    ),
    Recipe(
        id="sashimi_shrimp",
        category="sashimi",
        text="Chop the shrimp and put the chopped shrimp to a plate to make "
             "sashimi with shrimp.",
        ingredients=(_ing("shrimp", True),),
    ),
    # -- sushi --------------------------------------------------------------
    Recipe(
        id="sushi_fish",
        category="sushi",
        text="First chop the fish and cook the rice. Then put the chopped fish "
             "and cooked rice and a piece of nori on a plate to make a fish "
             "sushi.",
        ingredients=(_ing("fish", True), _ing("rice", False, "pot"), _ing("nori")),
    ),
    Recipe(
        id="sushi_cucumber",
        category="sushi",
        text="First chop the cucumber and cook the rice. Then put the chopped "
             "cucumber and cooked rice and a piece of nori on a plate to make a "
             "cucumber sushi.",
        ingredients=(_ing("cucumber", True), _ing("rice", False, "pot"), _ing("nori")),
    ),
    Recipe(
        id="sushi_full",
        category="sushi",
        text="First chop the fish and cucumber and cook the rice. Then put the "
             "chopped fish, chopped cucumber and cooked rice and a piece of "
             "nori on a plate to make a full sushi.",
        ingredients=(
            _ing("fish", True),
            _ing("cucumber", True),
            _ing("rice", False, "pot"),
            _ing("nori"),
        ),
    ),
)

RECIPE_INDEX: dict[str, Recipe] = {r.id: r for r in RECIPES}

CATEGORIES: dict[str, list[str]] = {}
for _r in RECIPES:
    CATEGORIES.setdefault(_r.category, []).append(_r.id)


def get_recipe(recipe_id: str) -> Recipe:
    try:
        return RECIPE_INDEX[recipe_id]
    except KeyError:
        raise KeyError(f"unknown recipe id {recipe_id!r}") from None
