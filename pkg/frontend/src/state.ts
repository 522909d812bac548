/** Session view state: which screen is active, which patient is selected,
 * and the append-only question history. */
import { AnswerBundlePayload } from "./api.js";

export type ViewName =
  | "Population"
  | "PatientDetail"
  | "QuestionConsole"
  | "GuidelineBrowser";

export interface HistoryEntry {
  question: string;
  bundle: AnswerBundlePayload;
}

export class ViewState {
  private _view: ViewName = "Population";
  private _selectedPatient: string | null = null;
  private _history: HistoryEntry[] = [];

  get view(): ViewName {
    return this._view;
  }

  get selectedPatient(): string | null {
    return this._selectedPatient;
  }

  get history(): readonly HistoryEntry[] {
    return this._history;
  }

  navigate(view: ViewName, patientId?: string): void {
    if (view === "PatientDetail") {
      const target = patientId ?? this._selectedPatient;
      if (!target) {
        throw new Error("PatientDetail requires a selected patient");
      }
      this._selectedPatient = target;
    } else if (patientId !== undefined) {
      this._selectedPatient = patientId;
    }
    this._view = view;
  }

  appendHistory(entry: HistoryEntry): void {
    this._history = [...this._history, entry];
  }
}
