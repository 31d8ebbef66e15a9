"""Recipe lookups with an ingredients/directions/nutrition engagement loop."""

from __future__ import annotations

from dataclasses import dataclass

from ..classifiers import IntentLabel
from ..textfeat import tokenize
from . import ComponentRequest, ComponentResponse

FIELD_ORDER = ["ingredients", "directions", "nutrition"]

NOT_FOUND = ("Sorry, I do not have a recipe for that. "
             "You could ask me about another dish, or we can switch topics.")


def _join(names: list[str]) -> str:
    if len(names) <= 1:
        return "".join(names)
    return ", ".join(names[:-1]) + " and " + names[-1]


@dataclass
class Recipe:
    title: str
    fields: dict[str, str]


class Food:
    def __init__(self, recipes: list[Recipe]):
        self.recipes = recipes
        self.by_title = {r.title.lower(): r for r in recipes}

    @classmethod
    def load(cls, path: str) -> "Food":
        """Recipe per line: title TAB field=value;field=value..."""
        recipes = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                title, _, rest = line.partition("\t")
                fields = {}
                for pair in rest.split(";"):
                    if pair.strip():
                        key, _, value = pair.partition("=")
                        fields[key.strip()] = value.strip()
                recipes.append(Recipe(title.strip(), fields))
        return cls(recipes)

    def find_recipe(self, tokens: list[str]) -> Recipe | None:
        best = None
        for recipe in self.recipes:
            rt = tokenize(recipe.title)
            for i in range(len(tokens) - len(rt) + 1):
                if tokens[i : i + len(rt)] == rt:
                    if best is None or len(rt) > len(tokenize(best.title)):
                        best = recipe
                    break
        return best

    def respond(self, req: ComponentRequest) -> ComponentResponse:
        if req.state_top == "Food" and req.sub_state == "awaiting_field":
            return self._serve_field(req)
        recipe = self.find_recipe(req.tokens)
        if recipe is None:
            return ComponentResponse(text=NOT_FOUND)
        available = [f for f in FIELD_ORDER if f in recipe.fields]
        return ComponentResponse(
            text=(f"I found a recipe for {recipe.title}. I have the {_join(available)} "
                  "for it. Which would you like?"),
            cache_updates={"recipe.title": recipe.title, "recipe.remaining_fields": available},
            sub_state="awaiting_field",
        )

    def _serve_field(self, req: ComponentRequest) -> ComponentResponse:
        title = str(req.cache.get("recipe.title", ""))
        recipe = self.by_title.get(title.lower())
        remaining = list(req.cache.get("recipe.remaining_fields", []))
        if req.decision.final_label == IntentLabel.Negative:
            return ComponentResponse(text="OK, no problem.", sub_state=None)
        choice = next((f for f in remaining if f in req.tokens), None)
        if choice is None or recipe is None:
            return ComponentResponse(
                text=f"For {title} I still have the {_join(remaining)}. Which would you like?",
                sub_state="awaiting_field",
            )
        remaining = [f for f in remaining if f != choice]
        served = f"Here are the {choice} for {title}: {recipe.fields[choice]}" \
            if choice == "ingredients" else f"Here is the {choice} information for {title}: {recipe.fields[choice]}"
        if remaining:
            return ComponentResponse(
                text=f"{served} I still have the {_join(remaining)}. Would you like those?",
                cache_updates={"recipe.remaining_fields": remaining},
                sub_state="awaiting_field",
            )
        return ComponentResponse(
            text=f"{served} That is the whole recipe.",
            cache_updates={"recipe.remaining_fields": remaining},
            sub_state=None,
        )
